#include "azb/suite.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include <Eigen/QR>

namespace azb {

ComplexMatrix haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrix g(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) g(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

std::vector<RepCase> rep_test_set(const GPair& pair, int count, std::uint64_t seed,
                                  const TolerancePolicy& policy) {
  const LatticeParams& p = pair.lattice;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, p.dim() - 1);
  std::vector<RepCase> out;
  for (int i = 0; i < count; ++i) {
    RepCase rc;
    rc.regular_block = i % 2 == 1;
    std::vector<GroupElement> chars;
    for (int c = 0; c < 1 + i % 3; ++c) chars.push_back(element_at(pick(rng), p));
    const int k = static_cast<int>(chars.size()) + (rc.regular_block ? p.dim() : 0);
    rc.cd = block_cdpair(pair, chars, rc.regular_block, haar_unitary(k, rng), policy);
    rc.name = "random-" + std::to_string(i);
    out.push_back(std::move(rc));
  }
  RepCase reg;
  reg.name = "regular";
  reg.regular_block = true;
  reg.cd = regular_cdpair(pair, policy);
  out.push_back(std::move(reg));
  return out;
}

std::vector<int> lattice_multiset(const std::vector<GroupElement>& g, const LatticeParams& p) {
  std::vector<int> out;
  for (const auto& x : g) out.push_back(index_of(x, p));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> lattice_multiset(const SpectralDecomposition& s, const LatticeParams& p) {
  std::vector<GroupElement> g;
  for (int i = 0; i < s.dim(); ++i) {
    const RayCoordinates rc = ray_coordinates(s.eigenvalues(i), p);
    g.push_back({rc.k, wrap_modulus(static_cast<int>(std::lround(rc.modulus_index)), p)});
  }
  return lattice_multiset(g, p);
}

const std::vector<std::string>& calibrated_keys() {
  static const std::vector<std::string> keys = {
      "qexp.commutator", "qexp.equation",   "qexp.gauge",         "w.ray_distance",
      "pentagon",        "delta.a",         "delta.b",            "rep.one_dim",
      "rep.regular",     "decompose.slice", "decompose.off_block", "decompose.por1",
      "decompose.por2",  "decompose.leg_identity", "decompose.stad1", "decompose.round_trip"};
  return keys;
}

SuiteMeasurements run_suite(const SuiteOptions& opts, const TolerancePolicy& policy) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteMeasurements out;
  out.options = opts;
  auto& v = out.values;
  const LatticeParams p = make_lattice(opts.n, opts.m);
  const GPair pair = canonical_pair(p);

  SolveOptions so;
  std::vector<QExp> solutions;
  for (int i = 0; i < std::max(opts.solver_seeds, 2); ++i) {
    so.seed = opts.seed + i;
    solutions.push_back(solve(pair, so, policy));
  }
  const QExp& f1 = solutions[0];
  const QExp one = constant_qexp(p);
  const MultUnitary w1 = build_W(pair, one, policy);
  ResidualOptions ro;
  ro.window = opts.window;
  v["qexp.gauge"] = gauge_distance(solutions[0], solutions[1]).distance;
  v["qexp.variance"] = std::numeric_limits<double>::infinity();
  v["qexp.converged"] = 1.0;
  for (const char* key : {"qexp.commutator", "qexp.equation", "w.unitarity", "w.raw_normality",
                          "w.raw_ray_distance", "w.ray_distance", "pentagon", "delta.a", "delta.b"})
    v[key] = 0.0;
  auto worst = [&](const char* key, double x) { v[key] = std::max(v[key], x); };
  for (const QExp& f : solutions) {
    worst("qexp.commutator", f.report.commutator);
    worst("qexp.equation", f.report.equation);
    v["qexp.variance"] = std::min(v["qexp.variance"], f.report.variance);
    if (!f.report.converged) v["qexp.converged"] = 0.0;
    const MultUnitary w = build_W(pair, f, policy);
    worst("w.unitarity", w.report.unitarity);
    worst("w.raw_normality", w.report.raw_normality);
    worst("w.raw_ray_distance", w.report.raw_ray_distance);
    worst("w.ray_distance", w.report.ray_distance);
    worst("pentagon", pentagon_residual(w, ro).residual);
    const DeltaResidual ds = delta_checks(w, pair, opts.window);
    worst("delta.a", ds.a);
    worst("delta.b", ds.b);
  }
  const MultUnitary wu = build_W(pair, f1, policy);
  v["pentagon.baseline"] = pentagon_residual(w1, ro).residual;
  const DeltaResidual db = delta_checks(w1, pair, opts.window);
  v["delta.a.baseline"] = db.a;
  v["delta.b.baseline"] = db.b;

  double one_dim = 0.0, regular = 0.0;
  double slice = 0.0, off_block = 0.0, por1 = 0.0, por2 = 0.0, leg = 0.0, stad1 = 0.0, rt = 0.0;
  double match_min = 1.0, unitarity = 0.0;
  int c_exact = 0, self_dual = 0, complete = 0;
  for (const RepCase& rc : rep_test_set(pair, opts.rep_cases, opts.rep_seed, policy)) {
    CaseResult cr;
    cr.name = rc.name;
    cr.regular_block = rc.regular_block;
    const Representation rep = build_V(rc.cd, pair, f1, policy);
    unitarity = std::max(unitarity, rep.unitarity);
    const Decomposition dc = decompose(rep, wu, pair, f1, ro, policy);
    cr.report = dc.report;
    cr.rep_residual = dc.report.rep_residual;
    double& family = rc.regular_block ? regular : one_dim;
    family = std::max(family, cr.rep_residual);
    if (dc.report.complete()) {
      ++complete;
      cr.c_exact = lattice_multiset(dc.cx.characters, p) == lattice_multiset(rc.cd.spec_c, p);
      cr.match_rate = lattice_match_rate(dc.dx, rc.cd.d, p, policy);
      if (dc.report.self_dual) ++self_dual;
    }
    if (cr.c_exact) ++c_exact;
    match_min = std::min(match_min, cr.match_rate);
    slice = std::max(slice, dc.report.slice_deviation);
    off_block = std::max(off_block, dc.report.off_block);
    por1 = std::max(por1, dc.report.por1);
    por2 = std::max(por2, dc.report.por2);
    leg = std::max(leg, dc.report.leg_identity);
    stad1 = std::max(stad1, dc.report.stad1);
    rt = std::max(rt, dc.report.round_trip);
    out.cases.push_back(std::move(cr));
  }
  const double n_cases = static_cast<double>(out.cases.size());
  v["rep.unitarity"] = unitarity;
  v["rep.one_dim"] = one_dim;
  v["rep.regular"] = regular;
  v["decompose.complete"] = complete / n_cases;
  v["decompose.c_exact"] = c_exact / n_cases;
  v["decompose.self_dual"] = self_dual / n_cases;
  v["decompose.match_min"] = match_min;
  v["decompose.slice"] = slice;
  v["decompose.off_block"] = off_block;
  v["decompose.por1"] = por1;
  v["decompose.por2"] = por2;
  v["decompose.leg_identity"] = leg;
  v["decompose.stad1"] = stad1;
  v["decompose.round_trip"] = rt;

  std::mt19937_64 rng(opts.rep_seed + 1000);
  double negative = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opts.negative_controls; ++i) {
    const int k = 1 + i % 3;
    const Representation rep = external_representation(haar_unitary(k * p.dim(), rng), k, p);
    const double r = rep_residual(rep, wu, ro).residual;
    out.negative.push_back(r);
    negative = std::min(negative, r);
  }
  v["rep.negative"] = negative;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace azb
