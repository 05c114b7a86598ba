// azb: generate models, solve for F, build and decompose representations,
// and gate residual checks against the calibration file.
//
// Exit codes: 0 all gated checks pass, 1 a residual check failed,
// 2 precondition, parameter or format failure.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "azb/errors.hpp"
#include "azb/io.hpp"
#include "azb/representations.hpp"
#include "azb/suite.hpp"

#include "CLI11.hpp"

namespace {

using azb::Json;

constexpr int kPass = 0;
constexpr int kResidualFail = 1;
constexpr int kPrecondition = 2;

struct Flags {
  int n = 6;
  int m = 2;
  std::uint64_t seed = 1;
  double window = 0.5;
  double gate_scale = 2.0;
  std::string out;
  std::string model;
  std::string rep;
  std::string which = "domain";
  std::string cd = "regular";
  bool constant = false;
};

class Precondition : public azb::Error {
 public:
  using Error::Error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

azb::Report new_report(const std::string& command, const std::string& file, const Flags& f,
                       const azb::Calibration* cal) {
  azb::Report r;
  r.command = command;
  r.file = file;
  r.seed = f.seed;
  r.flags = {{"n", f.n},           {"m", f.m},         {"seed", f.seed},
             {"window", f.window}, {"gate_scale", f.gate_scale}};
  if (cal != nullptr) {
    r.calibration_version = cal->version;
    r.extra["calibration"] = {{"path", cal->path}, {"N", cal->n}, {"M", cal->m}};
  }
  return r;
}

int emit(const azb::Report& r, const std::string& path = {}) {
  const std::string text = azb::report_to_json(r).dump(2) + "\n";
  if (path.empty())
    std::cout << text;
  else
    azb::write_text(path, text);
  return r.passed() ? kPass : kResidualFail;
}

azb::GPair model_pair(const azb::ModelFile& model) {
  const auto a = model.operators.find("a");
  const auto b = model.operators.find("b");
  if (a == model.operators.end() || b == model.operators.end())
    throw Precondition("model has no operators 'a' and 'b'");
  return azb::make_gpair(a->second, b->second, model.lattice(), model.policy);
}

const azb::QExp& model_qexp(const azb::ModelFile& model) {
  if (!model.qexp) throw Precondition("model has no qexp table; run solve-qexp first");
  return *model.qexp;
}

Json domain_json(const azb::DomainReport& d) {
  return {{"normality_a", d.normality_a},
          {"normality_b", d.normality_b},
          {"lattice_distance_a", d.lattice_distance_a},
          {"lattice_distance_b", d.lattice_distance_b},
          {"ray_distance_a", d.ray_distance_a},
          {"ray_distance_b", d.ray_distance_b},
          {"min_modulus_a", d.min_modulus_a},
          {"min_modulus_b", d.min_modulus_b},
          {"phase_relation", d.phase_relation},
          {"modulus_relation", d.modulus_relation},
          {"wrap_dim", d.wrap_dim}};
}

void add_domain_checks(azb::Report& r, const azb::DomainReport& d, const azb::TolerancePolicy& p,
                       const std::string& prefix) {
  r.add(prefix + "normality_a", "a a* = a* a", d.normality_a, p.normality);
  r.add(prefix + "normality_b", "b b* = b* b", d.normality_b, p.normality);
  r.add(prefix + "lattice_a", "Sp a on lattice points", d.lattice_distance_a, p.snap);
  r.add(prefix + "lattice_b", "Sp b on lattice points or 0", d.lattice_distance_b, p.snap);
  r.add_lower(prefix + "kernel_a", "ker a = {0}", d.min_modulus_a, p.snap);
  r.add(prefix + "phase_relation", "(Phase a) b = q b (Phase a)", d.phase_relation,
        p.phase_relation);
  r.add(prefix + "modulus_relation",
        "modulus relation (t-corrected reading) |a|^{it} b |a|^{-it} = e^{-2 pi t/N} b, non-wrap subspace",
        d.modulus_relation, p.modulus_relation);
}

void add_nondegenerate(azb::Report& r, const azb::QExp& f, const azb::TolerancePolicy& p) {
  r.add_lower("qexp.nondegenerate", "circular variance of F above the triviality floor",
              azb::circular_variance(f), p.trivial_variance);
}

int cmd_gen(const Flags& f) {
  const azb::LatticeParams p = azb::make_lattice(f.n, f.m);
  const azb::GPair pair = azb::canonical_pair(p);
  azb::ModelFile model;
  model.n = f.n;
  model.m = f.m;
  model.lambda = p.lambda;
  model.seed = f.seed;
  model.operators["a"] = pair.a;
  model.operators["b"] = pair.b;
  model.reports["domain"] = domain_json(pair.certificate);
  model.notes.push_back("canonical pair: a = diag(embed), b = F* a F");
  azb::Report r = new_report("gen", f.out, f, nullptr);
  add_domain_checks(r, pair.certificate, model.policy, "domain.");
  if (!f.out.empty()) azb::store_model(f.out, model);
  else std::cout << azb::dump_model(model);
  return f.out.empty() ? (r.passed() ? kPass : kResidualFail) : emit(r);
}

int cmd_solve(const Flags& f) {
  const azb::Calibration cal = azb::load_calibration();
  azb::ModelFile model = azb::load_model(f.model);
  const azb::GPair pair = model_pair(model);
  azb::Report r = new_report("solve-qexp", f.model, f, &cal);
  const auto t0 = std::chrono::steady_clock::now();
  azb::QExp q;
  if (f.constant) {
    q = azb::constant_qexp(pair.lattice);
    const azb::FuncEqResidual res = azb::func_eq_residual(q, azb::make_sr_pair(pair, model.policy),
                                                          f.window, model.policy);
    q.report.commutator = res.commutator;
    q.report.equation = res.equation;
  } else {
    azb::SolveOptions opts;
    opts.seed = f.seed;
    q = azb::solve(pair, opts, model.policy);
  }
  const double dt = seconds_since(t0);
  r.add("qexp.commutator", "[F(S)F(R), S+R] = 0", q.report.commutator,
        cal.gate("qexp.commutator", f.gate_scale), dt);
  r.add("qexp.equation", "F(S+R) = F(S)F(R), bulk", q.report.equation,
        cal.gate("qexp.equation", f.gate_scale));
  add_nondegenerate(r, q, model.policy);
  r.extra["solver"] = {{"converged", q.report.converged},
                       {"start", q.report.start},
                       {"sweeps", q.report.sweeps},
                       {"variance", q.report.variance}};
  model.qexp = q;
  model.seed = f.seed;
  model.reports["qexp"] = azb::report_to_json(r);
  azb::store_model(f.out.empty() ? f.model : f.out, model);
  return emit(r);
}

azb::Representation load_rep(const std::string& path, const azb::LatticeParams& p,
                             azb::ModelFile& file) {
  file = azb::load_model(path);
  if (file.n != p.n || file.m != p.m) throw Precondition("representation file lattice differs");
  const auto v = file.operators.find("V");
  if (v == file.operators.end() || file.kdim < 1)
    throw Precondition("representation file has no operator 'V' with kdim");
  return azb::external_representation(v->second, file.kdim, p);
}

int cmd_check(const Flags& f) {
  const azb::Calibration cal = azb::load_calibration();
  const azb::ModelFile model = azb::load_model(f.model);
  const azb::GPair pair = model_pair(model);
  const azb::TolerancePolicy& pol = model.policy;
  azb::Report r = new_report("check " + f.which, f.model, f, &cal);
  azb::ResidualOptions ro;
  ro.window = f.window;

  if (f.which == "domain") {
    add_domain_checks(r, pair.certificate, pol, "domain.");
    r.extra["domain"] = domain_json(pair.certificate);
    return emit(r, f.out);
  }
  const azb::QExp& q = model_qexp(model);
  auto t0 = std::chrono::steady_clock::now();
  const azb::MultUnitary wu = azb::build_W(pair, q, pol);
  r.add("w.unitarity", "W* W = I", wu.report.unitarity, pol.unitarity, seconds_since(t0));
  r.extra["build"] = {{"raw_normality", wu.report.raw_normality},
                      {"raw_ray_distance", wu.report.raw_ray_distance},
                      {"normality", wu.report.normality},
                      {"ray_distance", wu.report.ray_distance},
                      {"lattice_distance", wu.report.lattice_distance}};
  if (f.which == "pentagon") {
    t0 = std::chrono::steady_clock::now();
    const azb::LegResidual pr = azb::pentagon_residual(wu, ro);
    r.add("pentagon", "W23 W12 = W12 W13 W23, bulk", pr.residual,
          cal.gate("pentagon", f.gate_scale), seconds_since(t0));
    r.extra["pentagon"] = {{"sampled", pr.sampled}, {"columns", pr.columns}};
    add_nondegenerate(r, q, pol);
  } else if (f.which == "delta") {
    t0 = std::chrono::steady_clock::now();
    const azb::DeltaResidual d = azb::delta_checks(wu, pair, f.window);
    const double dt = seconds_since(t0);
    r.add("delta.a", "W (a x I) W* = a x a, bulk", d.a, cal.gate("delta.a", f.gate_scale), dt);
    r.add("delta.b", "W (b x I) W* = a x b + b x I, bulk", d.b,
          cal.gate("delta.b", f.gate_scale), dt);
    add_nondegenerate(r, q, pol);
  } else if (f.which == "rep") {
    if (f.rep.empty()) throw Precondition("check rep needs --rep FILE");
    azb::ModelFile file;
    const azb::Representation rep = load_rep(f.rep, pair.lattice, file);
    r.add("rep.unitarity", "V* V = I", rep.unitarity, pol.unitarity);
    t0 = std::chrono::steady_clock::now();
    const azb::LegResidual rr = azb::rep_residual(rep, wu, ro);
    const bool regular = file.reports.value("regular_block", true);
    const std::string key = regular ? "rep.regular" : "rep.one_dim";
    r.add("rep.residual", "W23 V12 = V12 V13 W23, bulk legs 2 and 3", rr.residual,
          cal.gate(key, f.gate_scale), seconds_since(t0));
    r.extra["rep"] = {{"file", f.rep}, {"gate_key", key}, {"sampled", rr.sampled}};
  } else {
    throw azb::ParameterError("--which must be domain, pentagon, delta or rep");
  }
  return emit(r, f.out);
}

std::vector<azb::GroupElement> parse_chars(const std::string& spec) {
  std::vector<azb::GroupElement> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    azb::GroupElement g;
    char comma = 0;
    std::stringstream is(item);
    if (!(is >> g.k >> comma >> g.j) || comma != ',')
      throw azb::ParameterError("character '" + item + "' is not k,j");
    out.push_back(g);
  }
  if (out.empty()) throw azb::ParameterError("empty character list");
  return out;
}

int cmd_rep(const Flags& f) {
  azb::ModelFile model = azb::load_model(f.model);
  const azb::GPair pair = model_pair(model);
  const azb::QExp& q = model_qexp(model);
  const azb::LatticeParams& p = pair.lattice;

  azb::CDPair cd;
  bool regular = false;
  if (f.cd == "regular") {
    cd = azb::regular_cdpair(pair, model.policy);
    regular = true;
  } else if (f.cd.rfind("chars:", 0) == 0) {
    cd = azb::block_cdpair(pair, parse_chars(f.cd.substr(6)), false, {}, model.policy);
  } else if (f.cd.rfind("random:", 0) == 0) {
    const int index = std::stoi(f.cd.substr(7));
    const auto set = azb::rep_test_set(pair, index + 1, f.seed, model.policy);
    cd = set[index].cd;
    regular = set[index].regular_block;
  } else {
    throw azb::ParameterError("--cd must be regular, chars:k,j;... or random:I");
  }

  const azb::Representation rep = azb::build_V(cd, pair, q, model.policy);
  azb::ModelFile out;
  out.n = p.n;
  out.m = p.m;
  out.lambda = p.lambda;
  out.seed = f.seed;
  out.kdim = cd.kdim;
  out.policy = model.policy;
  out.operators["V"] = rep.v;
  out.operators["c"] = cd.c;
  out.operators["d"] = cd.d;
  out.reports["cd_spec"] = f.cd;
  out.reports["regular_block"] = regular;
  out.reports["certificate"] = domain_json(cd.certificate);
  out.notes.push_back("V = F(d x b) chi(c x I, I x a) from " + f.model);

  azb::Report r = new_report("rep", f.model, f, nullptr);
  r.add("rep.unitarity", "V* V = I", rep.unitarity, model.policy.unitarity);
  r.extra["kdim"] = cd.kdim;
  r.extra["certificate"] = domain_json(cd.certificate);
  out.reports["build"] = azb::report_to_json(r);
  if (f.out.empty()) throw Precondition("rep needs --out FILE");
  azb::store_model(f.out, out);
  return emit(r);
}

int cmd_decompose(const Flags& f) {
  const azb::Calibration cal = azb::load_calibration();
  const azb::ModelFile model = azb::load_model(f.model);
  const azb::GPair pair = model_pair(model);
  const azb::QExp& q = model_qexp(model);
  const azb::TolerancePolicy& pol = model.policy;
  const azb::LatticeParams& p = pair.lattice;
  azb::ModelFile file;
  const azb::Representation rep = load_rep(f.rep, p, file);
  if (rep.unitarity > pol.unitarity)
    throw azb::DomainError("decompose: V is not unitary", rep.unitarity, pol.unitarity);

  azb::ResidualOptions ro;
  ro.window = f.window;
  const auto t0 = std::chrono::steady_clock::now();
  const azb::MultUnitary wu = azb::build_W(pair, q, pol);
  const azb::Decomposition dc = azb::decompose(rep, wu, pair, q, ro, pol);
  const double dt = seconds_since(t0);
  const azb::DecomposeReport& d = dc.report;

  azb::Report r = new_report("decompose", f.rep, f, &cal);
  const bool regular = file.reports.value("regular_block", true);
  r.add("rep.residual", "W23 V12 = V12 V13 W23, bulk legs 2 and 3", d.rep_residual,
        cal.gate(regular ? "rep.regular" : "rep.one_dim", f.gate_scale), dt);
  r.add("decompose.slice", "V* (id x theta_g) V = chi(c, g) x I", d.slice_deviation,
        pol.slice_gate);
  r.add("decompose.multiplicativity", "u_g u_h = u_gh on wrap-free products", d.multiplicativity,
        pol.character_gate);
  r.add("decompose.character", "slice eigenvalues are characters", d.character_residual,
        pol.character_gate);
  r.extra["stage"] = d.stage;
  if (!d.complete()) {
    r.add(d.stage, d.error, d.measured, d.gate);
    return emit(r, f.out);
  }
  r.add("decompose.off_block", "V chi(c x I, I x a)* = f(b)", d.off_block, pol.block_gate);
  r.add("decompose.block_commutation", "[f_beta, f_beta'] = 0", d.block_commutation,
        pol.block_gate);
  r.add("decompose.ambiguous", "unambiguous d matches", d.ambiguous, 0.0);
  r.add("decompose.por1", "(chi(c, g) x id) V = f(g b) chi(c x I, g I x a)", d.por1,
        cal.gate("decompose.por1", f.gate_scale));
  r.add("decompose.por2", "V (chi(c, g) x id) = f(b) chi(c x I, g I x a)", d.por2,
        cal.gate("decompose.por2", f.gate_scale));
  r.add("decompose.leg_identity", "V13 = chi(c, a x I)* f(a x b) chi(c, a x a), bulk",
        d.leg_identity, cal.gate("decompose.leg_identity", f.gate_scale));
  r.add("decompose.stad1", "d x I = chi(c x I, I x a)* (d x a) chi(c x I, I x a), bulk", d.stad1,
        cal.gate("decompose.stad1", f.gate_scale));
  r.add("decompose.round_trip", "V = build_V(c, d), bulk", d.round_trip,
        cal.gate("decompose.round_trip", f.gate_scale));
  r.add_lower("decompose.self_dual", "(c, d) passes the domain predicate", d.self_dual ? 1.0 : 0.0,
              1.0);
  const auto c_ref = file.operators.find("c");
  const auto d_ref = file.operators.find("d");
  if (c_ref != file.operators.end()) {
    azb::TolerancePolicy loose = pol;
    loose.normality = pol.build_normality;
    const bool exact = azb::lattice_multiset(dc.cx.characters, p) ==
                       azb::lattice_multiset(azb::normal_eig(c_ref->second, loose, p.n), p);
    r.add_lower("decompose.c_exact", "Sp c recovered as a multiset", exact ? 1.0 : 0.0, 1.0);
  }
  if (d_ref != file.operators.end())
    r.add_lower("decompose.lattice_match", "d eigenvalues on the matched lattice points",
                azb::lattice_match_rate(dc.dx, d_ref->second, p, pol), pol.lattice_match);

  azb::ModelFile out;
  out.n = p.n;
  out.m = p.m;
  out.lambda = p.lambda;
  out.seed = f.seed;
  out.kdim = rep.kdim;
  out.policy = pol;
  out.operators["c"] = dc.cd.c;
  out.operators["d"] = dc.cd.d;
  out.reports["certificate"] = domain_json(dc.cd.certificate);
  out.reports["decompose"] = azb::report_to_json(r);
  if (!f.out.empty()) azb::store_model(f.out, out);
  return emit(r);
}

void print_checks(const Json& report) {
  std::printf("%-34s %-5s %-12s %-12s\n", "check", "pass", "measured", "gate");
  for (const Json& c : report.at("checks")) {
    const double measured = c.at("measured").is_number() ? c.at("measured").get<double>() : NAN;
    std::printf("%-34s %-5s %-12.4g %s%-12.4g\n", c.at("check").get<std::string>().c_str(),
                c.at("pass").get<bool>() ? "yes" : "NO", measured,
                c.value("bound", "max") == "min" ? ">=" : "<=", c.at("gate").get<double>());
  }
}

int cmd_report(const Flags& f) {
  Json j;
  try {
    j = Json::parse(azb::read_text(f.model));
  } catch (const nlohmann::json::parse_error& e) {
    throw azb::FormatError(e.what());
  }
  const std::string format = j.value("format", std::string());
  if (format == "azb-report") {
    std::printf("command %s  file %s  seed %s  calibration %s\n",
                j.value("command", std::string()).c_str(), j.value("file", std::string()).c_str(),
                j.at("seed").dump().c_str(), j.value("calibration_version", std::string()).c_str());
    print_checks(j);
    return j.value("pass", false) ? kPass : kResidualFail;
  }
  if (format == "azb-model") {
    const azb::ModelFile model = azb::model_from_json(j);
    std::printf("model N=%d M=%d lambda=%.17g seed=%llu kdim=%d\n", model.n, model.m, model.lambda,
                static_cast<unsigned long long>(model.seed), model.kdim);
    for (const auto& [name, x] : model.operators)
      std::printf("  operator %-4s %lld x %lld\n", name.c_str(), static_cast<long long>(x.rows()),
                  static_cast<long long>(x.cols()));
    if (model.qexp)
      std::printf("  qexp: commutator %.4g  variance %.4g\n", model.qexp->report.commutator,
                  azb::circular_variance(*model.qexp));
    bool ok = true;
    for (const auto& [name, section] : model.reports.items())
      if (section.is_object() && section.value("format", std::string()) == "azb-report") {
        std::printf("[%s]\n", name.c_str());
        print_checks(section);
        ok = ok && section.value("pass", false);
      }
    return ok ? kPass : kResidualFail;
  }
  throw azb::FormatError("'" + f.model + "' is neither a report nor a model file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite az+b workbench"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--n", f.n, "N (even)");
    sub->add_option("--m", f.m, "M");
    sub->add_option("--seed", f.seed, "seed");
    sub->add_option("--window", f.window, "bulk window fraction");
    sub->add_option("--gate-scale", f.gate_scale, "multiple of the calibrated value used as gate");
    sub->add_option("--out", f.out, "output file");
  };
  CLI::App* gen = app.add_subcommand("gen", "canonical pair and domain report");
  common(gen);
  CLI::App* solve = app.add_subcommand("solve-qexp", "solve the functional equation for F");
  common(solve);
  solve->add_option("model", f.model)->required();
  solve->add_flag("--constant", f.constant, "store F = 1 instead of solving");
  CLI::App* check = app.add_subcommand("check", "gated residual checks");
  common(check);
  check->add_option("model", f.model)->required();
  check->add_option("--which", f.which, "domain, pentagon, delta or rep");
  check->add_option("--rep", f.rep, "representation file for --which rep");
  CLI::App* rep = app.add_subcommand("rep", "build V(c, d)");
  common(rep);
  rep->add_option("model", f.model)->required();
  rep->add_option("--cd", f.cd, "regular | chars:k,j;k,j | random:I");
  CLI::App* dec = app.add_subcommand("decompose", "recover (c, d) from a representation");
  common(dec);
  dec->add_option("model", f.model)->required();
  dec->add_option("rep", f.rep)->required();
  CLI::App* rpt = app.add_subcommand("report", "print a report or model summary");
  rpt->add_option("file", f.model)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kPrecondition;
  }
  try {
    if (gen->parsed()) return cmd_gen(f);
    if (solve->parsed()) return cmd_solve(f);
    if (check->parsed()) return cmd_check(f);
    if (rep->parsed()) return cmd_rep(f);
    if (dec->parsed()) return cmd_decompose(f);
    if (rpt->parsed()) return cmd_report(f);
  } catch (const azb::Error& e) {
    std::cerr << "azb: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "azb: " << e.what() << "\n";
    return kPrecondition;
  }
  return kPrecondition;
}
