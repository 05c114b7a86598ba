#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "azb/representations.hpp"

namespace azb {

/// Haar-distributed unitary (QR of a complex Gaussian, phases of R removed).
ComplexMatrix haar_unitary(int n, std::mt19937_64& rng);

struct RepCase {
  std::string name;
  CDPair cd;
  bool regular_block = false;
};

/// `count` seeded random pairs (one-dimensional characters, every second one
/// with a regular block, all mixed by a Haar unitary) followed by the regular
/// pair itself.
std::vector<RepCase> rep_test_set(const GPair& pair, int count, std::uint64_t seed,
                                  const TolerancePolicy& policy = default_policy());

/// Sorted lattice indices of the eigenvalues of a normal matrix whose
/// spectrum lies on lattice points; the modulus index is taken mod M.
std::vector<int> lattice_multiset(const SpectralDecomposition& s, const LatticeParams& p);
std::vector<int> lattice_multiset(const std::vector<GroupElement>& g, const LatticeParams& p);

struct SuiteOptions {
  int n = 6;
  int m = 2;
  std::uint64_t seed = 1;        // solver seeds are seed, seed + 1, ...
  int solver_seeds = 8;          // F-dependent values are the worst over these
  double window = 0.5;
  int rep_cases = 10;
  std::uint64_t rep_seed = 7;
  int negative_controls = 5;
};

struct CaseResult {
  std::string name;
  bool regular_block = false;
  double rep_residual = 0.0;
  DecomposeReport report;
  bool c_exact = false;
  double match_rate = 0.0;
};

/// Everything the calibration fixes and the acceptance suite gates, at one
/// (N, M).
struct SuiteMeasurements {
  SuiteOptions options;
  std::map<std::string, double> values;
  std::vector<CaseResult> cases;
  std::vector<double> negative;
  double seconds = 0.0;
};

SuiteMeasurements run_suite(const SuiteOptions& opts = {},
                            const TolerancePolicy& policy = default_policy());

/// Keys of `values` that calibration stores and gates at gate-scale times.
const std::vector<std::string>& calibrated_keys();

}  // namespace azb
