#include "azb/schrodinger.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "azb/errors.hpp"

namespace azb {

namespace {

// Eigenvalues and eigenvectors of a matrix that is only hoped to be normal.
// Normal input goes through normal_eig; anything else falls back to a general
// eigensolver so that check_domain can still report.
struct LooseSpectrum {
  ComplexVector values;
  ComplexMatrix vectors;
  bool unitary = true;

  ComplexMatrix apply(const ScalarFunction& f) const {
    ComplexVector fv(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) fv(i) = f(values(i));
    if (unitary) return vectors * fv.asDiagonal() * vectors.adjoint();
    return vectors * fv.asDiagonal() * vectors.inverse();
  }
};

LooseSpectrum loose_spectrum(const ComplexMatrix& t, const LatticeParams& p,
                             const TolerancePolicy& policy) {
  LooseSpectrum out;
  if (normality_residual(t) <= policy.normality) {
    const SpectralDecomposition s = normal_eig(t, policy, p.n);
    out.values = s.eigenvalues;
    out.vectors = s.basis;
    return out;
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(t);
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  out.unitary = false;
  return out;
}

Complex phase_of(Complex z) {
  const double r = std::abs(z);
  return r <= 1e-12 ? Complex(0.0) : z / r;
}

int group_index(const GroupElement& g, const LatticeParams& p) { return index_of(g, p); }

}  // namespace

bool DomainReport::passes(const TolerancePolicy& policy, bool lattice_spectra) const {
  const double dist_a = lattice_spectra ? lattice_distance_a : ray_distance_a;
  const double dist_b = lattice_spectra ? lattice_distance_b : ray_distance_b;
  const double gate = lattice_spectra ? policy.snap : policy.ray;
  return normality_a <= policy.normality && normality_b <= policy.normality && dist_a <= gate &&
         dist_b <= gate && min_modulus_a > policy.snap && phase_relation <= policy.phase_relation &&
         modulus_relation <= policy.modulus_relation;
}

ComplexMatrix fourier_chi(const LatticeParams& p) {
  const int d = p.dim();
  const std::vector<GroupElement> g = elements(p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  ComplexMatrix f(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) f(r, c) = scale * chi(g[r], g[c], p);
  return f;
}

double modulus_step(const LatticeParams& p) {
  return std::sqrt(static_cast<double>(p.n) / p.m);
}

GPair canonical_pair(const LatticeParams& p) {
  const int d = p.dim();
  GPair pair;
  pair.lattice = p;
  ComplexVector values(d);
  for (int i = 0; i < d; ++i) values(i) = embed(element_at(i, p), p);
  pair.a = values.asDiagonal();
  const ComplexMatrix ub = fourier_chi(p).adjoint();
  pair.b = ub * values.asDiagonal() * ub.adjoint();

  Clusters singletons;
  for (int i = 0; i < d; ++i) singletons.push_back({i});
  pair.spec_a = {values, ComplexMatrix::Identity(d, d), singletons};
  pair.spec_b = {values, ub, singletons};
  pair.certificate = check_domain(pair.a, pair.b, p);
  return pair;
}

GPair make_gpair(const ComplexMatrix& a, const ComplexMatrix& b, const LatticeParams& p,
                 const TolerancePolicy& policy) {
  if (a.rows() != p.dim() || b.rows() != p.dim() || a.cols() != p.dim() || b.cols() != p.dim())
    throw ParameterError("make_gpair: operators must have dimension NM");
  GPair pair;
  pair.lattice = p;
  pair.a = a;
  pair.b = b;
  pair.spec_a = normal_eig(a, policy, p.n);
  pair.spec_b = normal_eig(b, policy, p.n);
  pair.certificate = check_domain(a, b, p, policy);
  return pair;
}

DomainReport check_domain(const ComplexMatrix& a, const ComplexMatrix& b, const LatticeParams& p,
                          const TolerancePolicy& policy) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw ParameterError("check_domain: a and b must be square of equal size");
  DomainReport r;
  r.normality_a = normality_residual(a);
  r.normality_b = normality_residual(b);

  const LooseSpectrum sa = loose_spectrum(a, p, policy);
  const LooseSpectrum sb = loose_spectrum(b, p, policy);
  r.min_modulus_a = r.min_modulus_b = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sa.values.size(); ++i) {
    r.lattice_distance_a = std::max(r.lattice_distance_a, lattice_distance(sa.values(i), p));
    r.ray_distance_a = std::max(r.ray_distance_a, ray_distance(sa.values(i), p));
    r.min_modulus_a = std::min(r.min_modulus_a, std::abs(sa.values(i)));
  }
  for (Eigen::Index i = 0; i < sb.values.size(); ++i) {
    r.lattice_distance_b = std::max(r.lattice_distance_b, lattice_distance(sb.values(i), p));
    r.ray_distance_b = std::max(r.ray_distance_b, ray_distance(sb.values(i), p));
    r.min_modulus_b = std::min(r.min_modulus_b, std::abs(sb.values(i)));
  }

  const double bnorm = b.norm();
  const ComplexMatrix phase_a = sa.apply(phase_of);
  r.phase_relation =
      bnorm == 0.0 ? 0.0 : (phase_a * b - p.q * b * phase_a).norm() / bnorm;

  // Non-wrap subspace: b-eigenvectors whose modulus index is not the window
  // minimum (and not in the kernel).
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < sb.values.size(); ++i) {
    const double modulus = std::abs(sb.values(i));
    if (modulus <= policy.snap) continue;
    const int j = wrap_modulus(static_cast<int>(std::lround(std::log(modulus) / p.log_lambda())), p);
    if (j != p.j_min()) keep.push_back(static_cast<int>(i));
  }
  const int d = static_cast<int>(b.rows());
  r.wrap_dim = d - static_cast<int>(keep.size());
  if (!keep.empty()) {
    ComplexMatrix sel(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) sel.col(c) = sb.vectors.col(keep[c]);
    ComplexMatrix proj;
    if (sb.unitary) {
      proj = sel * sel.adjoint();
    } else {
      Eigen::HouseholderQR<ComplexMatrix> qr(sel);
      const ComplexMatrix q =
          qr.householderQ() * ComplexMatrix::Identity(d, static_cast<Eigen::Index>(keep.size()));
      proj = q * q.adjoint();
    }
    const double t1 = modulus_step(p);
    const ComplexMatrix a1 = sa.apply([t1](Complex z) {
      const double r0 = std::abs(z);
      return r0 <= 1e-12 ? Complex(1.0) : std::polar(1.0, t1 * std::log(r0));
    });
    const ComplexMatrix lhs = a1 * b * a1.adjoint() - b / p.lambda;
    const double scale = (b * proj).norm();
    r.modulus_relation = scale == 0.0 ? 0.0 : (lhs * proj).norm() / scale;
  }
  return r;
}

ComplexMatrix char_unitary(const GroupElement& t, const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  return funcalc(pair.spec_a, [&](Complex z) { return chi_ray(z, t, p); });
}

DualActionResult dual_action(const GroupElement& gamma, const ComplexMatrix& x,
                             const LatticeParams& p) {
  const int d = p.dim();
  if (x.rows() != d || x.cols() != d) throw ParameterError("dual_action: dimension mismatch");
  std::vector<int> sigma(d);
  for (int i = 0; i < d; ++i) sigma[i] = group_index(mul(gamma, element_at(i, p), p).value, p);
  DualActionResult out;
  out.value.resize(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) out.value(r, c) = x(sigma[r], sigma[c]);
  out.wrap = gamma.j != 0;
  return out;
}

ComplexMatrix dual_action_leg2(const GroupElement& gamma, const ComplexMatrix& x, int kdim,
                               const LatticeParams& p) {
  const int d = p.dim();
  const int n = kdim * d;
  if (x.rows() != n || x.cols() != n) throw ParameterError("dual_action_leg2: dimension mismatch");
  std::vector<int> sigma(n);
  for (int i = 0; i < kdim; ++i)
    for (int g = 0; g < d; ++g)
      sigma[i * d + g] = i * d + group_index(mul(gamma, element_at(g, p), p).value, p);
  ComplexMatrix out(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) out(r, c) = x(sigma[r], sigma[c]);
  return out;
}

WeylDecomposition weyl_decompose(const ComplexMatrix& x, const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  if (x.rows() != d || x.cols() != d) throw ParameterError("weyl_decompose: dimension mismatch");
  const ComplexMatrix& basis = pair.spec_b.basis;
  const ComplexMatrix xt = basis.adjoint() * x * basis;
  // U_t maps f_h to f_{h t^-1}, so entry (r, c) of X in the b-basis belongs
  // to t = r^-1 c.
  WeylDecomposition w;
  w.coefficients.assign(d, ComplexVector::Zero(d));
  for (int t = 0; t < d; ++t) {
    const GroupElement te = element_at(t, p);
    for (int r = 0; r < d; ++r) {
      const int c = group_index(mul(element_at(r, p), te, p).value, p);
      w.coefficients[t](r) = xt(r, c);
    }
  }
  return w;
}

ComplexMatrix weyl_reconstruct(const WeylDecomposition& w, const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const ComplexMatrix& basis = pair.spec_b.basis;
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int t = 0; t < d; ++t) {
    const ComplexMatrix g = basis * w.coefficients[t].asDiagonal() * basis.adjoint();
    out += g * char_unitary(element_at(t, p), pair);
  }
  return out;
}

ComplexMatrix to_leg2_basis(const ComplexMatrix& x, const ComplexMatrix& basis, int kdim) {
  const ComplexMatrix u = kron(ComplexMatrix::Identity(kdim, kdim), basis);
  return u.adjoint() * x * u;
}

ComplexMatrix from_leg2_basis(const ComplexMatrix& x, const ComplexMatrix& basis, int kdim) {
  const ComplexMatrix u = kron(ComplexMatrix::Identity(kdim, kdim), basis);
  return u * x * u.adjoint();
}

double off_block_mass(const ComplexMatrix& x, int kdim) {
  // Leg-2 index is the fast one: entry (i*D + beta, i'*D + beta') is in the
  // beta-th diagonal block when beta == beta'.
  const double total = x.norm();
  if (total == 0.0) return 0.0;
  const Eigen::Index d = x.rows() / kdim;
  double off = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      if (r % d != c % d) off += std::norm(x(r, c));
  return std::sqrt(off) / total;
}

InvarianceResult invariance_test(const ComplexMatrix& x, int kdim, const GPair& pair) {
  const LatticeParams& p = pair.lattice;
  InvarianceResult out;
  const double scale = x.norm();
  for (int g = 0; g < p.dim(); ++g) {
    const ComplexMatrix moved = dual_action_leg2(element_at(g, p), x, kdim, p);
    const double r = scale == 0.0 ? 0.0 : (moved - x).norm() / scale;
    out.invariance = std::max(out.invariance, r);
  }
  out.off_block = off_block_mass(to_leg2_basis(x, pair.spec_b.basis, kdim), kdim);
  out.implication_holds = !(out.invariance <= 1e-9) || out.off_block <= 1e-8;
  return out;
}

}  // namespace azb
