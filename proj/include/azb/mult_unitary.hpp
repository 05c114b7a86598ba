#pragma once

#include <cstdint>

#include "azb/qexp.hpp"

namespace azb {

struct BuildReport {
  double raw_normality = 0.0;     // a b^-1 as a plain product
  double raw_ray_distance = 0.0;  // its eigenvalues against the rays
  double normality = 0.0;         // Weyl-ordered ratio actually used
  double ray_distance = 0.0;      // Sp(T x b) against the rays
  double lattice_distance = 0.0;  // Sp(T) against lattice points (informational)
  double unitarity = 0.0;         // ||W*W - I||
  bool degenerate = false;        // F is (numerically) constant
};

struct MultUnitary {
  LatticeParams lattice;
  ComplexMatrix w;
  ComplexMatrix ratio;           // the argument T of F(T x b)
  SpectralDecomposition spec_ratio;
  BuildReport report;

  int dim() const { return lattice.dim(); }
};

/// q^{-1/2} (Phase a)(Phase b)^{-1} exp(log|a| - log|b|): the finite stand-in
/// for a b^{-1}. All factors commute, so it is normal with spectrum on the
/// rays, and it agrees with a b^{-1} in the continuum.
ComplexMatrix weyl_ordered_ratio(const GPair& pair, const TolerancePolicy& policy = default_policy());

/// W = F(T x b) chi(b^-1 x I, I x a).
MultUnitary build_W(const GPair& pair, const QExp& f,
                    const TolerancePolicy& policy = default_policy());

enum class ResidualMode { automatic, dense, probe };

struct ResidualOptions {
  double window = 0.5;
  ResidualMode mode = ResidualMode::automatic;
  int dense_budget = 16;  // largest NM for which every bulk column is used
  int probes = 64;
  std::uint64_t probe_seed = 20240611;
};

struct LegResidual {
  double residual = 0.0;
  bool sampled = false;
  int columns = 0;
};

/// ||W23 W12 - W12 W13 W23|| on the bulk window of all three legs, relative to
/// ||W23 W12|| on the same window.
LegResidual pentagon_residual(const MultUnitary& wu, const ResidualOptions& opts = {});

/// W (x x I) W*.
ComplexMatrix comultiply(const MultUnitary& wu, const ComplexMatrix& x);

struct DeltaResidual {
  double a = 0.0;
  double b = 0.0;
};

/// Bulk-windowed relative residuals of Delta(a) = a x a and
/// Delta(b) = a x b + b x I.
DeltaResidual delta_checks(const MultUnitary& wu, const GPair& pair, double window = 0.5);

/// Rows and columns (i, j) of a two-leg space with i in leg1, j in leg2.
std::vector<int> tensor_indices(const std::vector<int>& leg1, const std::vector<int>& leg2,
                                int d2);

/// ||X(rows, rows)|| restricted to an index set.
double compressed_norm(const ComplexMatrix& x, const std::vector<int>& idx);

}  // namespace azb
