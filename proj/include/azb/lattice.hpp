#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace azb {

using Complex = std::complex<double>;

/// Parameters of the finite window model of Gamma = U_k q^k R_+.
///
/// Group elements are pairs (k, j): k is the phase index mod N and j the
/// modulus index in the centered window {-j0, ..., M-1-j0}. The element embeds
/// as q^k * lambda^j.
///
/// lambda is pinned by requiring the modulus clause of chi,
///   chi(gamma, r) = |gamma|^{N/(2 pi i) log r},
/// to be a bicharacter of Z_M on lattice points. For gamma = lambda^j and
/// r = lambda^j' the clause gives exp(-i N (ln lambda)^2 j j' / (2 pi)), which
/// is M-periodic in j exactly when (N / 2 pi) (ln lambda)^2 = 2 pi / M, i.e.
/// lambda = exp(2 pi / sqrt(N M)).
struct LatticeParams {
  int n = 0;
  int m = 0;
  Complex q;
  double hbar = 0.0;
  double lambda = 0.0;
  int j0 = 0;

  int dim() const { return n * m; }
  int j_min() const { return -j0; }
  int j_max() const { return m - 1 - j0; }
  double log_lambda() const;
};

struct GroupElement {
  int k = 0;
  int j = 0;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// A point of Gamma-bar: either a group element or the distinguished zero.
using ClosedPoint = std::optional<GroupElement>;

/// Result of window arithmetic; wrap is set when the modulus index left the
/// window and was reduced mod M.
struct WindowResult {
  GroupElement value;
  bool wrap = false;
};

LatticeParams make_lattice(int n, int m);

bool in_window(const GroupElement& g, const LatticeParams& p);

/// Reduce an arbitrary modulus index into the window (mod M).
int wrap_modulus(int j, const LatticeParams& p);

/// Basis index of g in l^2(Gamma_disc): k * M + (j + j0).
int index_of(const GroupElement& g, const LatticeParams& p);
GroupElement element_at(int index, const LatticeParams& p);
std::vector<GroupElement> elements(const LatticeParams& p);

Complex embed(const GroupElement& g, const LatticeParams& p);
Complex embed(const ClosedPoint& g, const LatticeParams& p);

WindowResult mul(const GroupElement& g, const GroupElement& h, const LatticeParams& p);
WindowResult inv(const GroupElement& g, const LatticeParams& p);

/// Modulus indices of the bulk window: a centered run of
/// max(1, floor(M * fraction)) indices that always contains 0.
std::vector<int> bulk_moduli(const LatticeParams& p, double fraction = 0.5);

/// Basis indices whose modulus index lies in the bulk window.
std::vector<int> bulk_indices(const LatticeParams& p, double fraction = 0.5);

/// chi(g, h) = q^{k k'} exp(-2 pi i j j' / M).
Complex chi(const GroupElement& g, const GroupElement& h, const LatticeParams& p);

/// Position of a nonzero complex number relative to the rays: the nearest
/// phase index, the angular distance to that ray, and the continuous modulus
/// coordinate log_lambda |z|.
struct RayCoordinates {
  int k = 0;
  double angle_distance = 0.0;
  double modulus_index = 0.0;
};

RayCoordinates ray_coordinates(Complex z, const LatticeParams& p);

/// Angular distance of z from the nearest ray; zero for z == 0.
double ray_distance(Complex z, const LatticeParams& p);

/// Distance from z to the infinite lattice {q^k lambda^j : j in Z} union {0},
/// measured relative to the lattice point it is compared with.
double lattice_distance(Complex z, const LatticeParams& p);

/// chi evaluated with a continuous modulus in the first slot. z must lie on a
/// ray (angular tolerance ray_tol); chi_ray(0, .) = 1.
Complex chi_ray(Complex z, const GroupElement& h, const LatticeParams& p,
                double ray_tol = 1e-6);

/// chi with continuous moduli in both slots; used by the two-variable
/// functional calculus. Both arguments must lie on rays or be zero.
Complex chi_rays(Complex z1, Complex z2, const LatticeParams& p, double ray_tol = 1e-6);

}  // namespace azb
