#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "azb/qexp.hpp"
#include "json.hpp"

namespace azb {

inline constexpr int kFormatVersion = 1;

using Json = nlohmann::ordered_json;

Json matrix_to_json(const ComplexMatrix& x);
ComplexMatrix matrix_from_json(const Json& j);

Json policy_to_json(const TolerancePolicy& policy);
TolerancePolicy policy_from_json(const Json& j);

Json qexp_to_json(const QExp& f);
QExp qexp_from_json(const Json& j, const LatticeParams& p);

/// Model file: header, named dense operators, optional QExp table and
/// free-form report sections.
struct ModelFile {
  int version = kFormatVersion;
  int n = 0;
  int m = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int kdim = 0;  // representation space dimension, 0 when absent
  TolerancePolicy policy;
  std::map<std::string, ComplexMatrix> operators;
  std::optional<QExp> qexp;
  Json reports = Json::object();
  std::vector<std::string> notes;

  LatticeParams lattice() const { return make_lattice(n, m); }
};

Json model_to_json(const ModelFile& model);
ModelFile model_from_json(const Json& j);

std::string dump_model(const ModelFile& model);
void store_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

/// Calibrated baselines, one value per named check. Gates are
/// scale * max(value, floor).
struct Calibration {
  std::string version;
  std::string path;
  int n = 0;
  int m = 0;
  double floor = 0.0;
  std::map<std::string, double> values;
  Json provenance = Json::object();

  double value(const std::string& name) const;
  double gate(const std::string& name, double scale = 2.0) const;
};

Json calibration_to_json(const Calibration& c);
Calibration calibration_from_json(const Json& j);

/// Path from AZB_CALIBRATION, else the file committed with the sources.
std::string calibration_path();
Calibration load_calibration(const std::string& path = calibration_path());

struct CheckRecord {
  std::string name;
  std::string relation;  // what identity the residual measures
  double measured = 0.0;
  double gate = 0.0;
  bool pass = false;
  double seconds = 0.0;
  bool lower_bound = false;  // pass when measured >= gate
};

struct Report {
  std::string command;
  std::string file;
  Json flags = Json::object();
  std::uint64_t seed = 0;
  std::string calibration_version;
  std::vector<CheckRecord> checks;
  Json extra = Json::object();

  /// measured <= gate
  CheckRecord& add(const std::string& name, const std::string& relation, double measured,
                   double gate, double seconds = 0.0);
  CheckRecord& add_lower(const std::string& name, const std::string& relation, double measured,
                         double gate, double seconds = 0.0);
  bool passed() const;
};

Json report_to_json(const Report& r);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace azb
