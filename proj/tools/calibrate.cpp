// Brute-force calibration run. Writes the committed calibration file.
#include <cstdio>
#include <string>

#include "azb/io.hpp"
#include "azb/suite.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"calibrate approximation-layer gates"};
  azb::SuiteOptions opts;
  std::string out = AZB_DEFAULT_CALIBRATION;
  std::string version = "2";
  app.add_option("--n", opts.n);
  app.add_option("--m", opts.m);
  app.add_option("--seed", opts.seed);
  app.add_option("--solver-seeds", opts.solver_seeds);
  app.add_option("--window", opts.window);
  app.add_option("--out", out);
  app.add_option("--version", version);
  CLI11_PARSE(app, argc, argv);

  const azb::SuiteMeasurements s = azb::run_suite(opts);
  azb::Calibration c;
  c.version = version;
  c.n = opts.n;
  c.m = opts.m;
  c.floor = 1e-12;
  for (const std::string& key : azb::calibrated_keys()) c.values[key] = s.values.at(key);
  azb::Json info = azb::Json::object();
  for (const auto& [k, v] : s.values) info[k] = v;
  c.provenance = {{"tool", "azb_calibrate"},
                  {"first_solver_seed", opts.seed},
                  {"solver_seeds", opts.solver_seeds},
                  {"window", opts.window},
                  {"rep_cases", opts.rep_cases},
                  {"rep_seed", opts.rep_seed},
                  {"negative_controls", opts.negative_controls},
                  {"gate_rule", "gate = scale * max(value, floor), scale 2 in CI"},
                  {"measured", info}};
  azb::write_text(out, azb::calibration_to_json(c).dump(2) + "\n");
  for (const auto& [k, v] : s.values) std::printf("%-26s %.6g\n", k.c_str(), v);
  std::printf("wrote %s (%.1f s)\n", out.c_str(), s.seconds);
  return 0;
}
