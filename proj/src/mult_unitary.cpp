#include "azb/mult_unitary.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "azb/errors.hpp"
#include "azb/legops.hpp"

namespace azb {

namespace {

Complex phase_of(Complex z) {
  const double r = std::abs(z);
  return r <= 1e-12 ? Complex(0.0) : z / r;
}

Complex log_modulus(Complex z) { return std::log(std::abs(z)); }

void require_invertible_b(const GPair& pair, const TolerancePolicy& policy) {
  double min_b = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pair.spec_b.dim(); ++i)
    min_b = std::min(min_b, std::abs(pair.spec_b.eigenvalues(i)));
  if (min_b <= policy.snap) throw DomainError("b has a kernel", min_b, policy.snap);
}

}  // namespace

std::vector<int> tensor_indices(const std::vector<int>& leg1, const std::vector<int>& leg2,
                                int d2) {
  std::vector<int> out;
  out.reserve(leg1.size() * leg2.size());
  for (int i : leg1)
    for (int j : leg2) out.push_back(i * d2 + j);
  return out;
}

double compressed_norm(const ComplexMatrix& x, const std::vector<int>& idx) {
  double s = 0.0;
  for (int c : idx)
    for (int r : idx) s += std::norm(x(r, c));
  return std::sqrt(s);
}

ComplexMatrix weyl_ordered_ratio(const GPair& pair, const TolerancePolicy& policy) {
  require_invertible_b(pair, policy);
  const LatticeParams& p = pair.lattice;
  const ComplexMatrix phase_a = funcalc(pair.spec_a, phase_of);
  const ComplexMatrix phase_b = funcalc(pair.spec_b, phase_of);
  const ComplexMatrix h = funcalc(pair.spec_a, log_modulus) - funcalc(pair.spec_b, log_modulus);
  const SpectralDecomposition sh = hermitian_eig((h + h.adjoint()) * 0.5, policy);
  const ComplexMatrix scale = funcalc(sh, [](Complex x) { return Complex(std::exp(x.real())); });
  return std::polar(1.0, -p.hbar / 2.0) * phase_a * phase_b.adjoint() * scale;
}

MultUnitary build_W(const GPair& pair, const QExp& f, const TolerancePolicy& policy) {
  require_invertible_b(pair, policy);
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  MultUnitary wu;
  wu.lattice = p;

  const ComplexMatrix b_inv = funcalc(pair.spec_b, [](Complex z) { return 1.0 / z; });
  const ComplexMatrix raw = pair.a * b_inv;
  wu.report.raw_normality = normality_residual(raw);
  Eigen::ComplexEigenSolver<ComplexMatrix> raw_eig(raw, false);
  for (int i = 0; i < d; ++i)
    wu.report.raw_ray_distance =
        std::max(wu.report.raw_ray_distance, ray_distance(raw_eig.eigenvalues()(i), p));

  wu.ratio = weyl_ordered_ratio(pair, policy);
  wu.report.normality = normality_residual(wu.ratio);
  if (wu.report.normality > policy.build_normality)
    throw DomainError("build_W: argument of F is not normal", wu.report.normality,
                      policy.build_normality);
  TolerancePolicy loose = policy;
  loose.normality = policy.build_normality;
  wu.spec_ratio = normal_eig(wu.ratio, loose, p.n);
  for (int i = 0; i < d; ++i) {
    const Complex t = wu.spec_ratio.eigenvalues(i);
    wu.report.lattice_distance = std::max(wu.report.lattice_distance, lattice_distance(t, p));
    for (int j = 0; j < d; ++j)
      wu.report.ray_distance =
          std::max(wu.report.ray_distance, ray_distance(t * pair.spec_b.eigenvalues(j), p));
  }
  if (wu.report.ray_distance > policy.build_ray)
    throw DomainError("build_W: spectrum of the argument of F is off the rays",
                      wu.report.ray_distance, policy.build_ray);

  const ComplexMatrix first = kron_funcalc(
      wu.spec_ratio, pair.spec_b, [&](Complex x, Complex y) { return eval(f, x * y, policy.build_ray); });
  SpectralDecomposition spec_b_inv = pair.spec_b;
  for (int i = 0; i < d; ++i) spec_b_inv.eigenvalues(i) = 1.0 / pair.spec_b.eigenvalues(i);
  const ComplexMatrix second = kron_funcalc(
      spec_b_inv, pair.spec_a, [&](Complex x, Complex y) { return chi_rays(x, y, p, policy.ray); });
  wu.w = first * second;
  wu.report.unitarity = unitarity_residual(wu.w);
  wu.report.degenerate = circular_variance(f) < policy.trivial_variance;
  return wu;
}

LegResidual pentagon_residual(const MultUnitary& wu, const ResidualOptions& opts) {
  const LatticeParams& p = wu.lattice;
  const int d = p.dim();
  bool dense = false;
  switch (opts.mode) {
    case ResidualMode::dense:
      if (d > opts.dense_budget)
        throw BudgetError("pentagon_residual: NM = " + std::to_string(d) +
                          " exceeds the dense budget " + std::to_string(opts.dense_budget));
      dense = true;
      break;
    case ResidualMode::automatic:
      dense = d <= opts.dense_budget;
      break;
    case ResidualMode::probe:
      dense = false;
      break;
  }

  const LegSpace space({d, d, d});
  const std::vector<int> bulk = bulk_indices(p, opts.window);
  const std::vector<int> rows = space.product_indices({bulk, bulk, bulk});
  ComplexMatrix x;
  if (dense) {
    x = space.basis_columns(rows);
  } else {
    std::mt19937_64 rng(opts.probe_seed);
    std::normal_distribution<double> gauss;
    x = ComplexMatrix::Zero(space.total(), opts.probes);
    for (int c = 0; c < opts.probes; ++c)
      for (int r : rows) x(r, c) = Complex(gauss(rng), gauss(rng));
  }

  ComplexMatrix lhs = x;
  space.apply_pair(wu.w, LegPattern::l12, lhs);
  space.apply_pair(wu.w, LegPattern::l23, lhs);
  ComplexMatrix rhs = x;
  space.apply_pair(wu.w, LegPattern::l23, rhs);
  space.apply_pair(wu.w, LegPattern::l13, rhs);
  space.apply_pair(wu.w, LegPattern::l12, rhs);

  const ComplexMatrix l = select_rows(lhs, rows);
  const ComplexMatrix r = select_rows(rhs, rows);
  LegResidual out;
  out.sampled = !dense;
  out.columns = static_cast<int>(x.cols());
  const double scale = l.norm();
  out.residual = scale == 0.0 ? 0.0 : (l - r).norm() / scale;
  return out;
}

ComplexMatrix comultiply(const MultUnitary& wu, const ComplexMatrix& x) {
  if (x.rows() != wu.dim() || x.cols() != wu.dim())
    throw ParameterError("comultiply: operator must have dimension NM");
  return wu.w * kron(x, ComplexMatrix::Identity(wu.dim(), wu.dim())) * wu.w.adjoint();
}

DeltaResidual delta_checks(const MultUnitary& wu, const GPair& pair, double window) {
  const int d = wu.dim();
  const std::vector<int> bulk = bulk_indices(wu.lattice, window);
  const std::vector<int> idx = tensor_indices(bulk, bulk, d);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  DeltaResidual out;
  const ComplexMatrix target_a = kron(pair.a, pair.a);
  out.a = compressed_norm(comultiply(wu, pair.a) - target_a, idx) / compressed_norm(target_a, idx);
  const ComplexMatrix target_b = kron(pair.a, pair.b) + kron(pair.b, id);
  out.b = compressed_norm(comultiply(wu, pair.b) - target_b, idx) / compressed_norm(target_b, idx);
  return out;
}

}  // namespace azb
