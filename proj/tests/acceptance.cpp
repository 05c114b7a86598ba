// Acceptance run: one PASS/FAIL line per criterion at the pinned tolerances.
// Approximation-layer gates come from the calibration file.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "azb/io.hpp"
#include "azb/mult_unitary.hpp"
#include "azb/representations.hpp"
#include "azb/suite.hpp"

using namespace azb;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void line(const std::string& name, bool pass, double measured, const char* rel, double gate) {
  if (!pass) ++failures;
  std::printf("%s  %-52s measured %-11.4g %s %.4g\n", pass ? "PASS" : "FAIL", name.c_str(),
              measured, rel, gate);
  std::fflush(stdout);
}

void at_most(const std::string& name, double measured, double gate) {
  line(name, measured <= gate, measured, "<=", gate);
}

void at_least(const std::string& name, double measured, double gate) {
  line(name, measured >= gate, measured, ">=", gate);
}

ComplexMatrix gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) out(r, c) = Complex(g(rng), g(rng));
  return out;
}

void bicharacter_suite() {
  const auto t0 = Clock::now();
  const LatticeParams p = make_lattice(6, 3);
  const auto all = elements(p);
  double sym = 0.0, mult = 0.0, unimod = 0.0;
  int degenerate = 0;
  for (const GroupElement& g : all)
    for (const GroupElement& h : all) {
      sym = std::max(sym, std::abs(chi(g, h, p) - chi(h, g, p)));
      unimod = std::max(unimod, std::abs(std::abs(chi(g, h, p)) - 1.0));
      for (const GroupElement& e : all) {
        const auto gh = mul(g, h, p);
        if (gh.wrap) continue;
        mult = std::max(mult, std::abs(chi(gh.value, e, p) - chi(g, e, p) * chi(h, e, p)));
        mult = std::max(mult, std::abs(chi(e, gh.value, p) - chi(e, g, p) * chi(e, h, p)));
      }
    }
  for (const GroupElement& g : all) {
    if (g == GroupElement{0, 0}) continue;
    double far = 0.0;
    for (const GroupElement& h : all) far = std::max(far, std::abs(chi(g, h, p) - 1.0));
    if (far < 1e-12) ++degenerate;
  }
  at_most("bicharacter symmetry N=6 M=3", sym, 1e-12);
  at_most("bicharacter multiplicativity wrap-free N=6 M=3", mult, 1e-12);
  at_most("bicharacter unimodularity N=6 M=3", unimod, 1e-12);
  at_most("bicharacter nondegeneracy (degenerate elements)", degenerate, 0);
  at_most("bicharacter suite runtime s", since(t0), 5.0);
}

void canonical_pair_checks() {
  for (int m : {2, 3, 4}) {
    const LatticeParams p = make_lattice(6, m);
    const GPair pair = canonical_pair(p);
    const std::string tag = " N=6 M=" + std::to_string(m);
    at_most("fourier_chi unitarity" + tag, unitarity_residual(fourier_chi(p)), 1e-12);
    at_most("phase relation" + tag, pair.certificate.phase_relation, 1e-10);
    at_most("modulus relation non-wrap" + tag, pair.certificate.modulus_relation, 1e-10);
    const SpectralDecomposition sb = normal_eig(pair.b, default_policy(), p.n);
    const SpectralDecomposition sa = normal_eig(pair.a, default_policy(), p.n);
    double worst = 0.0;
    for (int i = 0; i < p.dim(); ++i)
      worst = std::max(worst, std::abs(sb.eigenvalues(i) - sa.eigenvalues(i)));
    at_most("Sp b = Sp a" + tag, worst, 1e-10);
  }
}

void z_transform_check() {
  std::mt19937_64 rng(50);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix u = haar_unitary(8, rng);
    ComplexVector z(8);
    for (int i = 0; i < 8; ++i) z(i) = Complex(g(rng), g(rng)) * 3.0;
    const ComplexMatrix t = u * z.asDiagonal() * u.adjoint();
    worst = std::max(worst, (z_inverse(z_transform(t)) - t).norm() / t.norm());
  }
  at_most("z-transform round trip 50 normals 8x8", worst, 1e-10);
}

void dual_action_check() {
  const LatticeParams p = make_lattice(6, 2);
  const GPair pair = canonical_pair(p);
  std::mt19937_64 rng(51);
  const ComplexMatrix x = gaussian(p.dim(), p.dim(), rng);
  double fix_b = 0.0, weyl = 0.0, law = 0.0;
  for (const GroupElement& g : elements(p)) {
    fix_b = std::max(fix_b, (dual_action(g, pair.b, p).value - pair.b).norm());
    for (const GroupElement& t : elements(p)) {
      const ComplexMatrix u = char_unitary(t, pair);
      weyl = std::max(weyl, (dual_action(g, u, p).value - chi(g, t, p) * u).norm());
    }
    for (const GroupElement& h : elements(p)) {
      const auto gh = mul(g, h, p);
      if (gh.wrap) continue;
      const ComplexMatrix two = dual_action(g, dual_action(h, x, p).value, p).value;
      law = std::max(law, (two - dual_action(gh.value, x, p).value).norm() / x.norm());
    }
  }
  at_most("dual action fixes b", fix_b, 1e-12);
  at_most("dual action on U_t is chi(g,t)", weyl, 1e-10);
  at_most("dual action group law wrap-free", law, 1e-10);
}

void weyl_check() {
  const LatticeParams p = make_lattice(6, 2);
  const GPair pair = canonical_pair(p);
  const int d = p.dim();
  double worst = 0.0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(r, c) = 1.0;
      worst = std::max(worst, (weyl_reconstruct(weyl_decompose(e, pair), pair) - e).norm());
    }
  at_most("Weyl reconstruction on matrix units N=6 M=2", worst, 1e-10);
}

void sr_pair_check() {
  const GPair pair = canonical_pair(make_lattice(6, 2));
  at_most("SRPair RS = q^2 SR relative N=6 M=2", make_sr_pair(pair).qsq_residual, 1e-10);
}

void extract_c_check(const GPair& pair, const QExp& f) {
  const auto t0 = Clock::now();
  const LatticeParams& p = pair.lattice;
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<int> pick(0, p.dim() - 1);
  int exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GroupElement> chars;
    for (int i = 0; i < 1 + trial % 4; ++i) chars.push_back(element_at(pick(rng), p));
    const CDPair cd = block_cdpair(pair, chars, false, {});
    const CExtraction cx = extract_c(build_V(cd, pair, f), pair);
    if (lattice_multiset(cx.characters, p) == lattice_multiset(chars, p)) ++exact;
  }
  at_least("extract_c exact on 20 lattice-diagonal c", exact, 20);
  at_most("extract_c runtime s", since(t0), 30.0);
}

}  // namespace

int main() {
  const auto t_all = Clock::now();
  const Calibration cal = load_calibration();
  std::printf("calibration %s version %s at N=%d M=%d\n", cal.path.c_str(), cal.version.c_str(),
              cal.n, cal.m);

  std::printf("-- exact layer\n");
  bicharacter_suite();
  const auto t_ext = Clock::now();
  canonical_pair_checks();
  const double ext_seconds = since(t_ext);
  z_transform_check();
  dual_action_check();
  weyl_check();
  sr_pair_check();

  std::printf("-- approximation layer\n");
  const auto t_suite = Clock::now();
  SuiteOptions opts;
  opts.n = cal.n;
  opts.m = cal.m;
  const SuiteMeasurements s = run_suite(opts);
  const auto& v = s.values;
  const TolerancePolicy& pol = default_policy();
  {
    const GPair pair = canonical_pair(make_lattice(opts.n, opts.m));
    SolveOptions so;
    so.seed = opts.seed;
    extract_c_check(pair, solve(pair, so, pol));
  }
  auto gate = [&](const std::string& key) { return cal.gate(key); };
  at_most("qexp commutator", v.at("qexp.commutator"), gate("qexp.commutator"));
  at_most("qexp dilation-gauge agreement two seeds", v.at("qexp.gauge"), gate("qexp.gauge"));
  at_least("qexp trivial solution rejected (variance)", v.at("qexp.variance"),
           pol.trivial_variance);
  at_most("W unitarity", v.at("w.unitarity"), 1e-9);
  at_most("pentagon bulk residual", v.at("pentagon"), gate("pentagon"));
  at_most("pentagon 5x below F=1 baseline", v.at("pentagon"), v.at("pentagon.baseline") / 5.0);
  at_most("Delta(a) bulk residual", v.at("delta.a"), gate("delta.a"));
  at_most("Delta(b) bulk residual", v.at("delta.b"), gate("delta.b"));
  line("Delta(a) below F=1 baseline", v.at("delta.a") < v.at("delta.a.baseline"), v.at("delta.a"),
       "<", v.at("delta.a.baseline"));
  line("Delta(b) below F=1 baseline", v.at("delta.b") < v.at("delta.b.baseline"), v.at("delta.b"),
       "<", v.at("delta.b.baseline"));

  double stad1 = 0.0, por1 = 0.0, por2 = 0.0;
  for (const CaseResult& c : s.cases) {
    const std::string key = c.regular_block ? "rep.regular" : "rep.one_dim";
    at_most("rep_residual " + c.name, c.rep_residual, gate(key));
    at_least("decompose c exact " + c.name, c.c_exact ? 1.0 : 0.0, 1.0);
    at_least("decompose d lattice match " + c.name, c.match_rate, pol.lattice_match);
    stad1 = std::max(stad1, c.report.stad1);
    por1 = std::max(por1, c.report.por1);
    por2 = std::max(por2, c.report.por2);
  }
  at_most("stad1 all cases", stad1, gate("decompose.stad1"));
  at_most("por1 all cases", por1, gate("decompose.por1"));
  at_most("por2 all cases", por2, gate("decompose.por2"));
  at_least("negative control 10x the one-dim rep gate", v.at("rep.negative"),
           10.0 * gate("rep.one_dim"));
  at_least("negative control 10x the regular-block rep gate", v.at("rep.negative"),
           10.0 * gate("rep.regular"));
  at_least("self-duality of decomposition outputs (fraction)", v.at("decompose.self_dual"), 1.0);
  at_most("suite runtime N=6 M=2 s", since(t_suite), 300.0);
  at_most("M=3,4 exact-layer extension runtime s", ext_seconds, 120.0);
  std::printf("-- %d failing criteria, %.1f s total\n", failures, since(t_all));
  return failures == 0 ? 0 : 1;
}
