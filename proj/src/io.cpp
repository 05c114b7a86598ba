#include "azb/io.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "azb/errors.hpp"

namespace azb {

namespace {

constexpr const char* kPolicyFields[] = {
    "hermitian",  "normality",      "commutation",   "cluster",         "snap",
    "unitarity",  "phase_relation", "modulus_relation", "ray",          "build_normality",
    "build_ray",  "slice_gate",     "block_gate",    "character_gate",  "lattice_match",
    "ambiguity",  "trivial_variance", "sum_normality"};

double* policy_field(TolerancePolicy& p, const std::string& name) {
  std::map<std::string, double*> fields = {
      {"hermitian", &p.hermitian},
      {"normality", &p.normality},
      {"commutation", &p.commutation},
      {"cluster", &p.cluster},
      {"snap", &p.snap},
      {"unitarity", &p.unitarity},
      {"phase_relation", &p.phase_relation},
      {"modulus_relation", &p.modulus_relation},
      {"ray", &p.ray},
      {"build_normality", &p.build_normality},
      {"build_ray", &p.build_ray},
      {"slice_gate", &p.slice_gate},
      {"block_gate", &p.block_gate},
      {"character_gate", &p.character_gate},
      {"lattice_match", &p.lattice_match},
      {"ambiguity", &p.ambiguity},
      {"trivial_variance", &p.trivial_variance},
      {"sum_normality", &p.sum_normality},
  };
  const auto it = fields.find(name);
  return it == fields.end() ? nullptr : it->second;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("complex entry must be an [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& x) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) data.push_back(complex_to_json(x(r, c)));
  return Json{{"rows", x.rows()}, {"cols", x.cols()}, {"data", data}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const auto rows = required<Eigen::Index>(j, "rows");
  const auto cols = required<Eigen::Index>(j, "cols");
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw FormatError("matrix data does not match its dimensions");
  ComplexMatrix x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = complex_from_json(data[r * cols + c]);
  return x;
}

Json policy_to_json(const TolerancePolicy& policy) {
  TolerancePolicy copy = policy;
  Json j = Json::object();
  for (const char* name : kPolicyFields) j[name] = *policy_field(copy, name);
  return j;
}

TolerancePolicy policy_from_json(const Json& j) {
  TolerancePolicy policy;
  if (!j.is_object()) throw FormatError("tolerance policy must be an object");
  for (const auto& [key, value] : j.items()) {
    double* field = policy_field(policy, key);
    if (field == nullptr) throw FormatError("unknown tolerance '" + key + "'");
    if (!value.is_number()) throw FormatError("tolerance '" + key + "' must be a number");
    *field = value.get<double>();
  }
  return policy;
}

Json qexp_to_json(const QExp& f) {
  Json table = Json::array();
  for (const Complex& z : f.table) table.push_back(complex_to_json(z));
  Json edge = Json::array();
  for (bool e : f.edge) edge.push_back(e);
  Json cache = Json::array();
  for (const auto& [k, ray] : f.cache)
    for (const auto& [s, v] : ray) cache.push_back(Json::array({k, s, v.real(), v.imag()}));
  Json trace = Json::array();
  for (double t : f.report.trace) trace.push_back(t);
  return Json{{"table", table},
              {"edge", edge},
              {"cache", cache},
              {"interpolation", f.interpolation},
              {"report",
               {{"commutator", f.report.commutator},
                {"equation", f.report.equation},
                {"variance", f.report.variance},
                {"seed", f.report.seed},
                {"start", f.report.start},
                {"sweeps", f.report.sweeps},
                {"converged", f.report.converged},
                {"trace", trace}}}};
}

QExp qexp_from_json(const Json& j, const LatticeParams& p) {
  const Json& table = j.at("table");
  if (!table.is_array() || static_cast<int>(table.size()) != p.dim())
    throw FormatError("qexp table size must be NM");
  std::vector<Complex> values;
  for (const Json& z : table) values.push_back(complex_from_json(z));
  QExp f;
  try {
    f = qexp_from_table(p, values);
  } catch (const DomainError& e) {
    throw FormatError(std::string("qexp table: ") + e.what());
  }
  if (j.contains("edge")) {
    const auto edge = j.at("edge").get<std::vector<bool>>();
    if (static_cast<int>(edge.size()) != p.dim()) throw FormatError("qexp edge size must be NM");
    f.edge = edge;
  }
  if (j.contains("cache"))
    for (const Json& e : j.at("cache")) {
      if (!e.is_array() || e.size() != 4) throw FormatError("qexp cache entries are [k, s, re, im]");
      f.cache[e[0].get<int>()][e[1].get<double>()] = {e[2].get<double>(), e[3].get<double>()};
    }
  if (j.contains("interpolation")) f.interpolation = j.at("interpolation").get<std::string>();
  if (j.contains("report")) {
    const Json& r = j.at("report");
    // non-finite residuals are written as null
    auto residual = [&](const char* key) {
      return r.contains(key) && r.at(key).is_number() ? r.at(key).get<double>()
                                                      : std::numeric_limits<double>::infinity();
    };
    f.report.commutator = residual("commutator");
    f.report.equation = residual("equation");
    f.report.variance = r.value("variance", 0.0);
    f.report.seed = r.value("seed", std::uint64_t{0});
    f.report.start = r.value("start", -1);
    f.report.sweeps = r.value("sweeps", 0);
    f.report.converged = r.value("converged", false);
    f.report.trace = r.value("trace", std::vector<double>{});
  }
  return f;
}

Json model_to_json(const ModelFile& model) {
  Json ops = Json::object();
  for (const auto& [name, x] : model.operators) ops[name] = matrix_to_json(x);
  Json j{{"format", "azb-model"},
         {"version", model.version},
         {"header",
          {{"N", model.n},
           {"M", model.m},
           {"lambda", model.lambda},
           {"seed", model.seed},
           {"kdim", model.kdim},
           {"tolerances", policy_to_json(model.policy)}}},
         {"operators", ops}};
  if (model.qexp) j["qexp"] = qexp_to_json(*model.qexp);
  j["reports"] = model.reports;
  j["notes"] = model.notes;
  return j;
}

namespace {

ModelFile parse_model(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "azb-model")
    throw FormatError("not a model file");
  ModelFile model;
  model.version = required<int>(j, "version");
  if (model.version != kFormatVersion)
    throw FormatError("model format version " + std::to_string(model.version) +
                      " is not supported (expected " + std::to_string(kFormatVersion) + ")");
  const Json& h = j.at("header");
  model.n = required<int>(h, "N");
  model.m = required<int>(h, "M");
  model.lambda = required<double>(h, "lambda");
  model.seed = required<std::uint64_t>(h, "seed");
  model.kdim = h.value("kdim", 0);
  if (h.contains("tolerances")) model.policy = policy_from_json(h.at("tolerances"));
  LatticeParams p;
  try {
    p = make_lattice(model.n, model.m);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("header: ") + e.what());
  }
  if (p.lambda != model.lambda) throw FormatError("header lambda does not match N and M");

  const int d = p.dim();
  const int k = model.kdim;
  for (const auto& [name, blob] : j.at("operators").items()) {
    ComplexMatrix x = matrix_from_json(blob);
    const Eigen::Index s = x.rows();
    const bool ok = x.cols() == s && (s == d || s == d * d || (k > 0 && (s == k || s == k * d)));
    if (!ok) throw FormatError("operator '" + name + "' has dimensions inconsistent with the header");
    model.operators.emplace(name, std::move(x));
  }
  if (j.contains("qexp")) model.qexp = qexp_from_json(j.at("qexp"), p);
  if (j.contains("reports")) model.reports = j.at("reports");
  if (j.contains("notes")) model.notes = j.at("notes").get<std::vector<std::string>>();
  return model;
}

}  // namespace

ModelFile model_from_json(const Json& j) {
  try {
    return parse_model(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

std::string dump_model(const ModelFile& model) { return model_to_json(model).dump(1) + "\n"; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FormatError("write to '" + path + "' failed");
}

void store_model(const std::string& path, const ModelFile& model) {
  write_text(path, dump_model(model));
}

ModelFile load_model(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

double Calibration::value(const std::string& name) const {
  const auto it = values.find(name);
  if (it == values.end()) throw FormatError("calibration has no entry '" + name + "'");
  return it->second;
}

double Calibration::gate(const std::string& name, double scale) const {
  return scale * std::max(value(name), floor);
}

Json calibration_to_json(const Calibration& c) {
  Json values = Json::object();
  for (const auto& [k, v] : c.values) values[k] = v;
  return Json{{"format", "azb-calibration"},
              {"version", c.version},
              {"N", c.n},
              {"M", c.m},
              {"floor", c.floor},
              {"values", values},
              {"provenance", c.provenance}};
}

namespace {

Calibration parse_calibration(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "azb-calibration")
    throw FormatError("not a calibration file");
  Calibration c;
  c.version = required<std::string>(j, "version");
  c.n = required<int>(j, "N");
  c.m = required<int>(j, "M");
  c.floor = j.value("floor", 0.0);
  for (const auto& [k, v] : j.at("values").items()) {
    if (!v.is_number()) throw FormatError("calibration value '" + k + "' must be a number");
    c.values[k] = v.get<double>();
  }
  if (j.contains("provenance")) c.provenance = j.at("provenance");
  return c;
}

}  // namespace

Calibration calibration_from_json(const Json& j) {
  try {
    return parse_calibration(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed calibration file: ") + e.what());
  }
}

std::string calibration_path() {
  if (const char* env = std::getenv("AZB_CALIBRATION"); env != nullptr && *env != '\0') return env;
  return AZB_DEFAULT_CALIBRATION;
}

Calibration load_calibration(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  Calibration c = calibration_from_json(j);
  c.path = path;
  return c;
}

CheckRecord& Report::add(const std::string& name, const std::string& relation, double measured,
                         double gate, double seconds) {
  checks.push_back({name, relation, measured, gate, measured <= gate, seconds, false});
  return checks.back();
}

CheckRecord& Report::add_lower(const std::string& name, const std::string& relation,
                               double measured, double gate, double seconds) {
  checks.push_back({name, relation, measured, gate, measured >= gate, seconds, true});
  return checks.back();
}

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Json report_to_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"check", c.name},
                      {"relation", c.relation},
                      {"measured", c.measured},
                      {"gate", c.gate},
                      {"bound", c.lower_bound ? "min" : "max"},
                      {"pass", c.pass},
                      {"seconds", c.seconds}});
  Json j{{"format", "azb-report"},
         {"command", r.command},
         {"file", r.file},
         {"flags", r.flags},
         {"seed", r.seed},
         {"calibration_version", r.calibration_version},
         {"pass", r.passed()},
         {"checks", checks}};
  if (!r.extra.empty()) j["details"] = r.extra;
  return j;
}

}  // namespace azb
