#include "azb/qexp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "azb/errors.hpp"

namespace azb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLatticeSnap = 1e-9;  // modulus-index distance treated as a lattice point
constexpr double kCacheKey = 1e-9;

GroupElement snap_element(Complex z, const LatticeParams& p) {
  const RayCoordinates rc = ray_coordinates(z, p);
  return {rc.k, wrap_modulus(static_cast<int>(std::lround(rc.modulus_index)), p)};
}

Complex unit(Complex z) {
  const double r = std::abs(z);
  return r == 0.0 ? Complex(1.0) : z / r;
}

// x y* T - T x y* for the rank-one matrix x y*.
ComplexMatrix rank_one_commutator(const ComplexVector& x, const ComplexVector& y,
                                  const ComplexMatrix& t) {
  const ComplexVector ty = t.adjoint() * y;
  const ComplexVector tx = t * x;
  return x * ty.adjoint() - tx * y.adjoint();
}

struct CacheAccumulator {
  std::map<int, std::map<double, Complex>> sums;

  void add(int k, double s, Complex value) {
    auto& ray = sums[k];
    auto it = ray.lower_bound(s - kCacheKey);
    if (it != ray.end() && it->first <= s + kCacheKey) {
      it->second += value;
    } else {
      ray.emplace(s, value);
    }
  }
};

// Everything the coordinate descent needs, expressed in the leg-1 a-basis and
// leg-2 b-basis where S + R is block diagonal.
struct SolverState {
  int d = 0;
  const SRPair* sr = nullptr;
  ComplexMatrix p;                          // columns p_u: leg-1 image of the b-eigenvector u
  std::vector<std::vector<int>> index;      // index[beta][i] = table index of alpha_i beta
  std::vector<std::vector<std::pair<int, int>>> occurrences;  // u -> (beta, i)
  std::vector<Complex> f;
  ComplexMatrix fb;                         // F(b) in the leg-1 a-basis
  std::vector<ComplexVector> diag;          // F(alpha_i beta)
  std::vector<ComplexMatrix> comm;          // [X_beta, T_beta]
  double norm_t = 0.0;

  void rebuild() {
    fb = p * Eigen::Map<const ComplexVector>(f.data(), d).asDiagonal() * p.adjoint();
    for (int beta = 0; beta < d; ++beta) {
      for (int i = 0; i < d; ++i) diag[beta](i) = f[index[beta][i]];
      const ComplexMatrix x = fb * diag[beta].asDiagonal();
      const ComplexMatrix& t = sr->blocks[beta];
      comm[beta] = x * t - t * x;
    }
  }

  double objective() const {
    double s = 0.0;
    for (const auto& c : comm) s += c.squaredNorm();
    return std::sqrt(s) / norm_t;
  }

  double variance() const {
    Complex s = 0.0;
    for (Complex v : f) s += v;
    return 1.0 - std::abs(s) / d;
  }
};

struct StartResult {
  std::vector<Complex> f;
  double objective = std::numeric_limits<double>::infinity();
  double variance = 0.0;
  int sweeps = 0;
  bool feasible = false;
  std::vector<double> trace;
};

void update_coordinate(SolverState& st, int u, const SolveOptions& opts) {
  const int d = st.d;
  const ComplexVector pu = st.p.col(u);
  const Complex w0 = st.f[u];
  const ComplexMatrix f0 = st.fb - w0 * pu * pu.adjoint();

  std::vector<std::vector<int>> positions(d);
  for (const auto& [beta, i] : st.occurrences[u]) positions[beta].push_back(i);

  std::vector<ComplexMatrix> c0(d), c1(d), c2(d);
  Eigen::Matrix3cd gram = Eigen::Matrix3cd::Zero();
  for (int beta = 0; beta < d; ++beta) {
    const ComplexMatrix& t = st.sr->blocks[beta];
    ComplexVector d0 = st.diag[beta];
    ComplexVector mask_p = ComplexVector::Zero(d);
    for (int i : positions[beta]) {
      d0(i) = 0.0;
      mask_p(i) = pu(i);
    }
    const ComplexVector y1 = d0.conjugate().cwiseProduct(pu);
    c1[beta] = rank_one_commutator(pu, y1, t);
    for (int i : positions[beta]) {
      const ComplexVector x = f0.col(i);
      c1[beta] += x * t.row(i) - (t * x) * ComplexVector::Unit(d, i).transpose();
    }
    c2[beta] = rank_one_commutator(pu, mask_p, t);
    c0[beta] = st.comm[beta] - w0 * c1[beta] - w0 * w0 * c2[beta];
    const ComplexMatrix* cs[3] = {&c0[beta], &c1[beta], &c2[beta]};
    for (int k = 0; k < 3; ++k)
      for (int l = k; l < 3; ++l) gram(k, l) += cs[k]->cwiseProduct(cs[l]->conjugate()).sum();
  }
  // gram(k, l) = <C_l, C_k>; phi(theta) = a0 + 2 Re(a1 e^{i theta} + a2 e^{2 i theta})
  const double a0 = (gram(0, 0) + gram(1, 1) + gram(2, 2)).real();
  const Complex a1 = std::conj(gram(0, 1) + gram(1, 2));
  const Complex a2 = std::conj(gram(0, 2));
  auto phi = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    return a0 + 2.0 * (a1 * e).real() + 2.0 * (a2 * e * e).real();
  };

  Complex total = 0.0;
  for (Complex v : st.f) total += v;
  const Complex rest = total - w0;
  auto variance = [&](double theta) { return 1.0 - std::abs(rest + std::polar(1.0, theta)) / d; };
  auto feasible = [&](double theta) { return variance(theta) >= opts.variance_floor; };

  const double theta0 = std::arg(w0);
  double best = theta0;
  double best_value = feasible(theta0) ? phi(theta0) : std::numeric_limits<double>::infinity();
  for (int m = 0; m < opts.grid; ++m) {
    const double theta = kTwoPi * m / opts.grid;
    if (!feasible(theta)) continue;
    const double v = phi(theta);
    if (v < best_value) {
      best_value = v;
      best = theta;
    }
  }
  if (std::isinf(best_value)) {
    best = std::arg(rest) + std::numbers::pi;
  } else {
    // golden-section refinement around the grid minimum
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best - kTwoPi / opts.grid;
    double hi = best + kTwoPi / opts.grid;
    auto penalized = [&](double theta) {
      return feasible(theta) ? phi(theta) : std::numeric_limits<double>::infinity();
    };
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = penalized(x1);
    double f2 = penalized(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - invphi * (hi - lo);
        f1 = penalized(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + invphi * (hi - lo);
        f2 = penalized(x2);
      }
    }
    const double mid = 0.5 * (lo + hi);
    const double fm = penalized(mid);
    if (fm < best_value) best = mid;
  }

  const Complex w = std::polar(1.0, best);
  for (int beta = 0; beta < d; ++beta) st.comm[beta] = c0[beta] + w * c1[beta] + w * w * c2[beta];
  st.fb = f0 + w * pu * pu.adjoint();
  for (const auto& [beta, i] : st.occurrences[u]) st.diag[beta](i) = w;
  st.f[u] = w;
}

StartResult run_start(SolverState& st, std::vector<Complex> start, const SolveOptions& opts) {
  st.f = std::move(start);
  st.rebuild();
  StartResult out;
  double previous = st.objective();
  bool previous_feasible = st.variance() >= opts.variance_floor;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (int u = 0; u < st.d; ++u) update_coordinate(st, u, opts);
    st.rebuild();
    const double current = st.objective();
    const bool feasible = st.variance() >= opts.variance_floor;
    out.trace.push_back(current);
    out.sweeps = sweep + 1;
    if (feasible && previous_feasible && previous - current <= opts.stop * previous) break;
    previous = current;
    previous_feasible = feasible;
  }
  out.f = st.f;
  out.objective = st.objective();
  out.variance = st.variance();
  out.feasible = out.variance >= opts.variance_floor;
  return out;
}

}  // namespace

QExp constant_qexp(const LatticeParams& p, Complex value) {
  QExp f;
  f.lattice = p;
  f.table.assign(p.dim(), value);
  f.edge.assign(p.dim(), false);
  return f;
}

QExp qexp_from_table(const LatticeParams& p, const std::vector<Complex>& table) {
  if (static_cast<int>(table.size()) != p.dim())
    throw ParameterError("qexp_from_table: table size must be NM");
  for (Complex v : table) {
    const double dev = std::abs(std::abs(v) - 1.0);
    if (dev > 1e-12) throw DomainError("qexp_from_table: entry is not unimodular", dev, 1e-12);
  }
  QExp f = constant_qexp(p);
  f.table = table;
  return f;
}

double circular_variance(const QExp& f) {
  Complex s = 0.0;
  for (Complex v : f.table) s += v;
  return 1.0 - std::abs(s) / static_cast<double>(f.table.size());
}

Complex eval(const QExp& f, Complex z, double ray_tol) {
  const LatticeParams& p = f.lattice;
  if (std::abs(z) <= 1e-12) return 1.0;
  const RayCoordinates rc = ray_coordinates(z, p);
  if (rc.angle_distance > ray_tol)
    throw DomainError("eval: argument is not on a ray", rc.angle_distance, ray_tol);
  const double s = rc.modulus_index;
  const double nearest = std::round(s);
  if (std::abs(s - nearest) <= kLatticeSnap)
    return f.at({rc.k, wrap_modulus(static_cast<int>(nearest), p)});

  const auto ray = f.cache.find(rc.k);
  if (ray != f.cache.end()) {
    const auto it = ray->second.lower_bound(s - kCacheKey);
    if (it != ray->second.end() && it->first <= s + kCacheKey) return it->second;
  }

  const int j = static_cast<int>(std::floor(s));
  const double t = s - j;
  const Complex v0 = f.at({rc.k, wrap_modulus(j, p)});
  const Complex v1 = f.at({rc.k, wrap_modulus(j + 1, p)});
  const double phi0 = std::arg(v0);
  const double step = std::remainder(std::arg(v1) - phi0, kTwoPi);
  return std::polar(1.0, phi0 + t * step);
}

SRPair make_sr_pair(const GPair& pair, const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  double min_b = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) min_b = std::min(min_b, std::abs(pair.spec_b.eigenvalues(i)));
  if (min_b <= policy.snap) throw DomainError("make_sr_pair: b has a kernel", min_b, policy.snap);

  SRPair sr;
  sr.lattice = p;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  sr.s = kron(pair.b, id);
  sr.r = kron(pair.a, pair.b);
  const ComplexMatrix rs = sr.r * sr.s;
  sr.qsq_residual = (rs - p.q * p.q * sr.s * sr.r).norm() / rs.norm();

  sr.leg1_basis = pair.spec_a.basis;
  sr.leg1_values = pair.spec_a.eigenvalues;
  sr.leg2_basis = pair.spec_b.basis;
  sr.leg2_values = pair.spec_b.eigenvalues;
  const ComplexMatrix b1 = sr.leg1_basis.adjoint() * pair.b * sr.leg1_basis;
  const ComplexMatrix a1 = sr.leg1_values.asDiagonal();

  double comm = 0.0;
  double total = 0.0;
  for (int beta = 0; beta < d; ++beta) {
    ComplexMatrix t = b1 + sr.leg2_values(beta) * a1;
    comm += (t * t.adjoint() - t.adjoint() * t).squaredNorm();
    total += t.squaredNorm();
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(t);
    sr.block_values.push_back(solver.eigenvalues());
    sr.block_vectors.push_back(solver.eigenvectors());
    sr.block_inverse.push_back(solver.eigenvectors().inverse());
    for (int i = 0; i < d; ++i)
      sr.sum_ray_distance = std::max(sr.sum_ray_distance, ray_distance(solver.eigenvalues()(i), p));
    sr.blocks.push_back(std::move(t));
  }
  sr.sum_normality = std::sqrt(comm) / total;
  return sr;
}

ComplexMatrix qexp_of_s(const QExp& f, const SRPair& sr) {
  const int d = sr.dim();
  ComplexVector values(d);
  for (int i = 0; i < d; ++i) values(i) = eval(f, sr.leg2_values(i));
  const ComplexMatrix fb = sr.leg2_basis * values.asDiagonal() * sr.leg2_basis.adjoint();
  return kron(fb, ComplexMatrix::Identity(d, d));
}

ComplexMatrix qexp_of_r(const QExp& f, const SRPair& sr) {
  const SpectralDecomposition a{sr.leg1_values, sr.leg1_basis, {}};
  const SpectralDecomposition b{sr.leg2_values, sr.leg2_basis, {}};
  return kron_funcalc(a, b, [&](Complex x, Complex y) { return eval(f, x * y); });
}

ComplexMatrix qexp_of_sum(const QExp& f, const SRPair& sr) {
  const int d = sr.dim();
  ComplexMatrix block_form = ComplexMatrix::Zero(d * d, d * d);
  for (int beta = 0; beta < d; ++beta) {
    ComplexVector values(d);
    for (int i = 0; i < d; ++i) values(i) = eval(f, sr.block_values[beta](i));
    const ComplexMatrix m =
        sr.block_vectors[beta] * values.asDiagonal() * sr.block_inverse[beta];
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) block_form(r * d + beta, c * d + beta) = m(r, c);
  }
  const ComplexMatrix u = kron(sr.leg1_basis, sr.leg2_basis);
  return u * block_form * u.adjoint();
}

FuncEqResidual func_eq_residual(const QExp& f, const SRPair& sr, double window,
                                const TolerancePolicy& policy) {
  if (sr.sum_normality > policy.sum_normality)
    throw DomainError("func_eq_residual: S+R is too far from normal", sr.sum_normality,
                      policy.sum_normality);
  const LatticeParams& p = sr.lattice;
  const int d = sr.dim();
  FuncEqResidual out;

  ComplexVector fvals(d);
  for (int i = 0; i < d; ++i) fvals(i) = eval(f, sr.leg2_values(i));
  const ComplexMatrix p1 = sr.leg1_basis.adjoint() * sr.leg2_basis;
  const ComplexMatrix fb = p1 * fvals.asDiagonal() * p1.adjoint();
  double comm = 0.0;
  double total = 0.0;
  for (int beta = 0; beta < d; ++beta) {
    ComplexVector dv(d);
    for (int i = 0; i < d; ++i) dv(i) = eval(f, sr.leg1_values(i) * sr.leg2_values(beta));
    const ComplexMatrix x = fb * dv.asDiagonal();
    const ComplexMatrix& t = sr.blocks[beta];
    comm += (x * t - t * x).squaredNorm();
    total += t.squaredNorm();
  }
  out.commutator = std::sqrt(comm / total);

  const ComplexMatrix product = qexp_of_s(f, sr) * qexp_of_r(f, sr);
  const ComplexMatrix diff = qexp_of_sum(f, sr) - product;
  const std::vector<int> bulk = bulk_indices(p, window);
  std::vector<int> rows;
  for (int i : bulk)
    for (int j : bulk) rows.push_back(i * d + j);
  double num = 0.0;
  double den = 0.0;
  for (int c : rows)
    for (int r : rows) {
      num += std::norm(diff(r, c));
      den += std::norm(product(r, c));
    }
  out.equation = den == 0.0 ? 0.0 : std::sqrt(num / den);
  return out;
}

QExp solve(const GPair& pair, const SolveOptions& opts, const TolerancePolicy& policy) {
  if (opts.starts < 1 || opts.grid < 8 || opts.max_sweeps < 1)
    throw ParameterError("solve: starts >= 1, grid >= 8 and max_sweeps >= 1 required");
  const LatticeParams& p = pair.lattice;
  const int d = p.dim();
  const SRPair sr = make_sr_pair(pair, policy);

  SolverState st;
  st.d = d;
  st.sr = &sr;
  st.p = sr.leg1_basis.adjoint() * sr.leg2_basis;
  st.index.assign(d, std::vector<int>(d));
  st.occurrences.assign(d, {});
  for (int beta = 0; beta < d; ++beta)
    for (int i = 0; i < d; ++i) {
      const int u = index_of(snap_element(sr.leg1_values(i) * sr.leg2_values(beta), p), p);
      st.index[beta][i] = u;
      st.occurrences[u].push_back({beta, i});
    }
  st.diag.assign(d, ComplexVector(d));
  st.comm.assign(d, ComplexMatrix(d, d));
  double total = 0.0;
  for (const auto& t : sr.blocks) total += t.squaredNorm();
  st.norm_t = std::sqrt(total);

  // Solver coordinates are table entries; column u of st.p is the b-eigenvector
  // whose eigenvalue is embed(u).
  {
    ComplexMatrix ordered(d, d);
    std::vector<bool> seen(d, false);
    for (int v = 0; v < d; ++v) {
      const int u = index_of(snap_element(sr.leg2_values(v), p), p);
      if (seen[u]) throw ParameterError("solve: spectrum of b must cover the lattice once");
      seen[u] = true;
      ordered.col(u) = st.p.col(v);
    }
    st.p = ordered;
  }

  StartResult best;
  int best_start = -1;
  for (int s = 0; s < opts.starts; ++s) {
    std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(s)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<Complex> start(d, 1.0);
    if (!opts.constant_start)
      for (int u = 0; u < d; ++u) start[u] = std::polar(1.0, angle(rng));
    StartResult r = run_start(st, start, opts);
    if (!r.feasible || r.variance < policy.trivial_variance) continue;
    if (r.objective < best.objective) {
      best = std::move(r);
      best_start = s;
    }
  }

  QExp f = constant_qexp(p);
  f.report.seed = opts.seed;
  if (best_start < 0) {
    f.report.converged = false;
    f.report.commutator = std::numeric_limits<double>::infinity();
    return f;
  }

  Complex sum = 0.0;
  for (Complex v : best.f) sum += v;
  const Complex gauge = std::conj(unit(sum));
  for (int u = 0; u < d; ++u) f.table[u] = best.f[u] * gauge;

  // Off-lattice values on Sp(S+R): Rayleigh quotients of F(S)F(R) on the
  // block eigenvectors.
  const ComplexMatrix fb =
      st.p * Eigen::Map<const ComplexVector>(f.table.data(), d).asDiagonal() * st.p.adjoint();
  CacheAccumulator acc;
  for (int beta = 0; beta < d; ++beta) {
    ComplexVector dv(d);
    for (int i = 0; i < d; ++i) dv(i) = f.table[st.index[beta][i]];
    const ComplexMatrix x = fb * dv.asDiagonal();
    for (int i = 0; i < d; ++i) {
      const Complex z = sr.block_values[beta](i);
      if (std::abs(z) <= 1e-12) continue;
      const RayCoordinates rc = ray_coordinates(z, p);
      if (rc.angle_distance > policy.ray) continue;
      if (std::abs(rc.modulus_index - std::round(rc.modulus_index)) <= kLatticeSnap) continue;
      const ComplexVector v = sr.block_vectors[beta].col(i);
      acc.add(rc.k, rc.modulus_index, unit(v.dot(x * v) / v.squaredNorm()));
    }
  }
  for (auto& [k, ray] : acc.sums)
    for (auto& [s, v] : ray) f.cache[k][s] = unit(v);

  const FuncEqResidual res = func_eq_residual(f, sr, 0.5, policy);
  f.report.commutator = res.commutator;
  f.report.equation = res.equation;
  f.report.variance = circular_variance(f);
  f.report.start = best_start;
  f.report.sweeps = best.sweeps;
  f.report.trace = best.trace;
  f.report.converged = res.commutator <= opts.threshold;
  return f;
}

QExp dilate(const QExp& f, const GroupElement& mu) {
  const LatticeParams& p = f.lattice;
  QExp out = f;
  out.report = {};
  for (int i = 0; i < p.dim(); ++i) {
    const WindowResult m = mul(mu, element_at(i, p), p);
    out.table[i] = f.at(m.value);
    out.edge[i] = m.wrap;
  }
  out.cache.clear();
  for (const auto& [k, ray] : f.cache)
    for (const auto& [s, v] : ray) {
      const int k2 = ((k - mu.k) % p.n + p.n) % p.n;
      out.cache[k2][s - mu.j] = v;
    }
  return out;
}

GaugeMatch gauge_distance(const QExp& f1, const QExp& f2) {
  const LatticeParams& p = f1.lattice;
  GaugeMatch best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const GroupElement& mu : elements(p)) {
    double worst = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      worst = std::max(worst, std::abs(f2.table[i] - f1.at(mul(mu, element_at(i, p), p).value)));
    if (worst < best.distance) {
      best.distance = worst;
      best.mu = mu;
    }
  }
  return best;
}

}  // namespace azb
