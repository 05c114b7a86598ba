#pragma once

#include <string>
#include <vector>

#include "azb/mult_unitary.hpp"

namespace azb {

/// Parameters (c, d) of a representation on K. Same predicate as GPair with
/// the kernel requirement on c only.
struct CDPair {
  LatticeParams lattice;
  int kdim = 0;
  ComplexMatrix c;
  ComplexMatrix d;
  SpectralDecomposition spec_c;
  SpectralDecomposition spec_d;
  DomainReport certificate;

  bool passes(const TolerancePolicy& policy = default_policy()) const;
};

CDPair make_cdpair(const ComplexMatrix& c, const ComplexMatrix& d, const LatticeParams& p,
                   const TolerancePolicy& policy = default_policy());

/// (b^-1, T) on K = H, T the Weyl-ordered ratio used by build_W.
CDPair regular_cdpair(const GPair& pair, const TolerancePolicy& policy = default_policy());

/// Direct sum of one-dimensional pairs (embed(g_i), 0), optionally followed by
/// a copy of the regular pair, conjugated by `mix` (identity when empty).
CDPair block_cdpair(const GPair& pair, const std::vector<GroupElement>& characters,
                    bool with_regular, const ComplexMatrix& mix = {},
                    const TolerancePolicy& policy = default_policy());

struct Representation {
  LatticeParams lattice;
  int kdim = 0;
  ComplexMatrix v;  // on K x H, index k * NM + h
  std::string provenance;
  double unitarity = 0.0;

  int dim() const { return lattice.dim(); }
};

Representation external_representation(const ComplexMatrix& v, int kdim, const LatticeParams& p);

/// chi(c x I, I x a) on K x H.
ComplexMatrix bicharacter_factor(const SpectralDecomposition& spec_c, const GPair& pair,
                                 double ray_tol = 1e-6);

/// V = F(d x b) chi(c x I, I x a).
Representation build_V(const CDPair& cd, const GPair& pair, const QExp& f,
                        const TolerancePolicy& policy = default_policy());

/// ||W23 V12 - V12 V13 W23|| relative, legs 2 and 3 windowed to the bulk.
LegResidual rep_residual(const Representation& rep, const MultUnitary& wu,
                         const ResidualOptions& opts = {});

struct CExtraction {
  ComplexMatrix c;
  ComplexMatrix basis;                  // joint eigenbasis of the slices
  std::vector<GroupElement> characters; // matched element per basis vector
  double slice_deviation = 0.0;         // worst ||X_g - u_g x I|| / ||X_g||
  double multiplicativity = 0.0;        // worst ||u_g u_h - u_gh|| over wrap-free products
  double character_residual = 0.0;      // worst |eigenvalue - chi(c_i, g)|
  GroupElement worst;                   // gamma attaining slice_deviation
};

/// c from the dual-action slices V* (id x theta_g)(V) = chi(c, g) x I.
CExtraction extract_c(const Representation& rep, const GPair& pair,
                      const TolerancePolicy& policy = default_policy());

struct FFactor {
  std::vector<ComplexMatrix> blocks;  // f_beta, beta in the order of pair.spec_b
  ComplexMatrix f;                    // V chi(c x I, I x a)*
  double off_block = 0.0;
};

FFactor factor_f(const Representation& rep, const CExtraction& cx, const GPair& pair,
                 const TolerancePolicy& policy = default_policy());

struct DExtraction {
  ComplexMatrix d;
  ComplexMatrix basis;
  std::vector<int> candidate;   // per basis vector: lattice index, or -1 for 0
  std::vector<double> score;    // best sum_beta |phi_beta - F(mu beta)|^2
  std::vector<double> runner_up;
  std::vector<bool> ambiguous;
  double block_commutation = 0.0;
};

DExtraction extract_d(const std::vector<ComplexMatrix>& blocks, const QExp& f, const GPair& pair,
                      const TolerancePolicy& policy = default_policy());

/// Fraction of basis vectors w whose snapped w* d_ref w equals the matched
/// candidate.
double lattice_match_rate(const DExtraction& dx, const ComplexMatrix& d_ref,
                          const LatticeParams& p, const TolerancePolicy& policy = default_policy());

struct DecomposeReport {
  std::string stage = "done";  // stage that failed, or "done"
  std::string error;
  double measured = 0.0;  // value that tripped the failing gate
  double gate = 0.0;
  double rep_residual = 0.0;
  double slice_deviation = 0.0;
  double multiplicativity = 0.0;
  double character_residual = 0.0;
  double off_block = 0.0;
  double block_commutation = 0.0;
  int ambiguous = 0;
  double por1 = 0.0;
  double por2 = 0.0;
  double leg_identity = 0.0;  // V13 against its (c, f) factorization
  double stad1 = 0.0;
  double round_trip = 0.0;
  bool self_dual = false;  // (c, d) passes the domain predicate

  bool complete() const { return stage == "done"; }
};

struct Decomposition {
  CDPair cd;
  CExtraction cx;
  FFactor ff;
  DExtraction dx;
  DecomposeReport report;
};

Decomposition decompose(const Representation& rep, const MultUnitary& wu, const GPair& pair,
                        const QExp& f, const ResidualOptions& opts = {},
                        const TolerancePolicy& policy = default_policy());

/// max over gamma of ||(chi(c, g) x I) V - f(g b) chi(c x I, g I x a)||, leg 2
/// restricted to b-eigenvectors with g beta wrap-free, relative to ||V||.
double por1_residual(const Representation& rep, const CExtraction& cx, const FFactor& ff,
                     const GPair& pair);
/// max over gamma of ||V (chi(c, g) x I) - f(b) chi(c x I, g I x a)|| relative.
double por2_residual(const Representation& rep, const CExtraction& cx, const FFactor& ff,
                     const GPair& pair);
/// V13 against chi(c, a x I)* f(a x b) chi(c, a x a) on the bulk of legs 2, 3.
double leg_identity_residual(const Representation& rep, const CExtraction& cx, const FFactor& ff,
                             const GPair& pair, double window = 0.5);
/// ||d x I - chi(c x I, I x a)* (d x a) chi(c x I, I x a)|| on the bulk of leg 2.
double stad1_residual(const CDPair& cd, const GPair& pair, double window = 0.5);
/// ||V - V'|| relative, leg 2 windowed to the bulk.
double round_trip_residual(const Representation& v1, const Representation& v2, double window = 0.5);

}  // namespace azb
