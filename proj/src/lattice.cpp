#include "azb/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "azb/errors.hpp"

namespace azb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kZero = 1e-12;

int mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

double LatticeParams::log_lambda() const { return std::log(lambda); }

LatticeParams make_lattice(int n, int m) {
  if (n % 2 != 0) throw ParameterError("N must be even, got " + std::to_string(n));
  if (n < 6) throw ParameterError("N must be at least 6, got " + std::to_string(n));
  if (m < 2) throw ParameterError("M must be at least 2, got " + std::to_string(m));
  LatticeParams p;
  p.n = n;
  p.m = m;
  p.hbar = kTwoPi / n;
  p.q = std::polar(1.0, p.hbar);
  p.lambda = std::exp(kTwoPi / std::sqrt(static_cast<double>(n) * m));
  p.j0 = m / 2;
  return p;
}

bool in_window(const GroupElement& g, const LatticeParams& p) {
  return g.k >= 0 && g.k < p.n && g.j >= p.j_min() && g.j <= p.j_max();
}

int wrap_modulus(int j, const LatticeParams& p) { return mod(j + p.j0, p.m) - p.j0; }

int index_of(const GroupElement& g, const LatticeParams& p) {
  return mod(g.k, p.n) * p.m + (wrap_modulus(g.j, p) + p.j0);
}

GroupElement element_at(int index, const LatticeParams& p) {
  return {index / p.m, index % p.m - p.j0};
}

std::vector<GroupElement> elements(const LatticeParams& p) {
  std::vector<GroupElement> out;
  out.reserve(p.dim());
  for (int i = 0; i < p.dim(); ++i) out.push_back(element_at(i, p));
  return out;
}

std::vector<int> bulk_moduli(const LatticeParams& p, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ParameterError("bulk window fraction must lie in (0, 1]");
  const int size = std::max(1, static_cast<int>(std::floor(p.m * fraction + 1e-12)));
  std::vector<int> out;
  for (int j = -(size / 2); j < size - size / 2; ++j) out.push_back(j);
  return out;
}

std::vector<int> bulk_indices(const LatticeParams& p, double fraction) {
  const std::vector<int> moduli = bulk_moduli(p, fraction);
  std::vector<int> out;
  for (int k = 0; k < p.n; ++k)
    for (int j : moduli) out.push_back(index_of({k, j}, p));
  return out;
}

Complex embed(const GroupElement& g, const LatticeParams& p) {
  // q^k computed from the reduced exponent keeps arg exactly on the grid.
  return std::polar(std::pow(p.lambda, g.j), p.hbar * mod(g.k, p.n));
}

Complex embed(const ClosedPoint& g, const LatticeParams& p) {
  return g ? embed(*g, p) : Complex{0.0, 0.0};
}

WindowResult mul(const GroupElement& g, const GroupElement& h, const LatticeParams& p) {
  const int j = g.j + h.j;
  const int jr = wrap_modulus(j, p);
  return {{mod(g.k + h.k, p.n), jr}, jr != j};
}

WindowResult inv(const GroupElement& g, const LatticeParams& p) {
  const int jr = wrap_modulus(-g.j, p);
  return {{mod(-g.k, p.n), jr}, jr != -g.j};
}

Complex chi(const GroupElement& g, const GroupElement& h, const LatticeParams& p) {
  // Reduce both exponents so the result is exact on the finite group.
  const int phase = mod(g.k * h.k, p.n);
  const int modulus = mod(g.j * h.j, p.m);
  return std::polar(1.0, p.hbar * phase - kTwoPi * modulus / p.m);
}

RayCoordinates ray_coordinates(Complex z, const LatticeParams& p) {
  RayCoordinates rc;
  const double sector = std::arg(z) / p.hbar;
  const double nearest = std::round(sector);
  rc.k = mod(static_cast<int>(nearest), p.n);
  rc.angle_distance = std::abs(sector - nearest) * p.hbar;
  rc.modulus_index = std::log(std::abs(z)) / p.log_lambda();
  return rc;
}

double ray_distance(Complex z, const LatticeParams& p) {
  if (std::abs(z) <= kZero) return 0.0;
  return ray_coordinates(z, p).angle_distance;
}

double lattice_distance(Complex z, const LatticeParams& p) {
  const double r = std::abs(z);
  if (r <= kZero) return 0.0;
  const RayCoordinates rc = ray_coordinates(z, p);
  const Complex nearest =
      std::polar(std::pow(p.lambda, std::round(rc.modulus_index)), p.hbar * rc.k);
  return std::min(std::abs(z - nearest) / std::abs(nearest), r);
}

Complex chi_ray(Complex z, const GroupElement& h, const LatticeParams& p, double ray_tol) {
  if (std::abs(z) <= kZero) return {1.0, 0.0};
  const RayCoordinates rc = ray_coordinates(z, p);
  if (rc.angle_distance > ray_tol)
    throw DomainError("chi_ray: argument is not on a ray", rc.angle_distance, ray_tol);
  const int phase = mod(rc.k * h.k, p.n);
  // |z|^{N/(2 pi i) log lambda^j'} with log|z| = s log lambda
  const double modulus_phase =
      -p.n * std::log(std::abs(z)) * h.j * p.log_lambda() / kTwoPi;
  return std::polar(1.0, p.hbar * phase + modulus_phase);
}

Complex chi_rays(Complex z1, Complex z2, const LatticeParams& p, double ray_tol) {
  if (std::abs(z1) <= kZero || std::abs(z2) <= kZero) return {1.0, 0.0};
  const RayCoordinates r1 = ray_coordinates(z1, p);
  const RayCoordinates r2 = ray_coordinates(z2, p);
  const double worst = std::max(r1.angle_distance, r2.angle_distance);
  if (worst > ray_tol) throw DomainError("chi: argument is not on a ray", worst, ray_tol);
  const int phase = mod(r1.k * r2.k, p.n);
  const double modulus_phase =
      -p.n * std::log(std::abs(z1)) * std::log(std::abs(z2)) / kTwoPi;
  return std::polar(1.0, p.hbar * phase + modulus_phase);
}

}  // namespace azb
