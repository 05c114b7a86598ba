#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "azb/schrodinger.hpp"

namespace azb {

struct QExpReport {
  double commutator = 0.0;  // ||[F(S)F(R), S+R]|| / ||S+R||
  double equation = 0.0;    // bulk ||F(S+R) - F(S)F(R)|| / ||F(S)F(R)||
  double variance = 0.0;    // circular variance of the table
  std::uint64_t seed = 0;
  int start = -1;           // accepted multi-start index
  int sweeps = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after each sweep of the accepted start
};

/// The quantum exponential as a unit-modulus table on the lattice, plus
/// cached values at off-lattice points of the rays. Off-lattice points
/// without a cache entry are interpolated along the ray, linearly in
/// log-modulus on the unwrapped phase.
struct QExp {
  LatticeParams lattice;
  std::vector<Complex> table;  // indexed by index_of
  std::vector<bool> edge;      // entry came through a window wrap (dilate)
  // ray k -> continuous modulus index -> value
  std::map<int, std::map<double, Complex>> cache;
  std::string interpolation = "ray-log-linear";
  QExpReport report;

  Complex at(const GroupElement& g) const { return table[index_of(g, lattice)]; }
};

QExp constant_qexp(const LatticeParams& p, Complex value = 1.0);

/// Ingestion path for an externally supplied table; every entry must have
/// modulus 1 to 1e-12.
QExp qexp_from_table(const LatticeParams& p, const std::vector<Complex>& table);

/// F(z) for z on a ray or z = 0. Integer modulus indices outside the window
/// are reduced mod M.
Complex eval(const QExp& f, Complex z, double ray_tol = 1e-6);

/// 1 - |mean of the table|.
double circular_variance(const QExp& f);

/// S = b x I and R = a x b. In the leg-2 b-eigenbasis S + R is block
/// diagonal with blocks T_beta = b + beta a, which are diagonalized once.
struct SRPair {
  LatticeParams lattice;
  ComplexMatrix s;
  ComplexMatrix r;
  double qsq_residual = 0.0;    // ||RS - q^2 SR|| / ||RS||
  double sum_normality = 0.0;   // ||TT* - T*T|| / ||T||^2 for T = S + R
  double sum_ray_distance = 0.0;

  ComplexMatrix leg1_basis;            // eigenbasis of a
  ComplexVector leg1_values;           // eigenvalues of a
  ComplexMatrix leg2_basis;            // eigenbasis of b
  ComplexVector leg2_values;           // eigenvalues of b
  std::vector<ComplexMatrix> blocks;   // T_beta in the leg-1 a-basis
  std::vector<ComplexVector> block_values;
  std::vector<ComplexMatrix> block_vectors;
  std::vector<ComplexMatrix> block_inverse;

  int dim() const { return lattice.dim(); }
};

SRPair make_sr_pair(const GPair& pair, const TolerancePolicy& policy = default_policy());

struct FuncEqResidual {
  double commutator = 0.0;
  double equation = 0.0;
};

/// Residuals of F(S + R) = F(S) F(R). The equation residual is compressed to
/// the bulk window (position basis) on both legs.
FuncEqResidual func_eq_residual(const QExp& f, const SRPair& sr, double window = 0.5,
                                const TolerancePolicy& policy = default_policy());

/// Dense F(S), F(R) and F(S+R) for cross-checks; F(S+R) uses the block
/// eigen-decompositions.
ComplexMatrix qexp_of_s(const QExp& f, const SRPair& sr);
ComplexMatrix qexp_of_r(const QExp& f, const SRPair& sr);
ComplexMatrix qexp_of_sum(const QExp& f, const SRPair& sr);

struct SolveOptions {
  std::uint64_t seed = 1;
  int starts = 8;
  int max_sweeps = 400;
  int grid = 256;
  double stop = 1e-12;            // relative improvement per sweep
  double variance_floor = 0.1;    // hard lower bound on circular variance
  double threshold = 1.0;         // non-convergence above this residual
  bool constant_start = false;    // start from F = 1 instead of random phases
};

/// Coordinate descent on the NM phases minimizing the commutator residual
/// subject to circular variance >= variance_floor, multi-start, deterministic.
QExp solve(const GPair& pair, const SolveOptions& opts = {},
           const TolerancePolicy& policy = default_policy());

/// F'(g) = F(mu g), cache moved along.
QExp dilate(const QExp& f, const GroupElement& mu);

struct GaugeMatch {
  double distance = 0.0;  // max_g |F2(g) - F1(mu g)|
  GroupElement mu;
};

/// Best dilation aligning f1 to f2.
GaugeMatch gauge_distance(const QExp& f1, const QExp& f2);

}  // namespace azb
