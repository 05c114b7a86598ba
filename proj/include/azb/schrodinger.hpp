#pragma once

#include <vector>

#include "azb/linalg.hpp"

namespace azb {

/// Measured residuals of the operator-domain predicate for a pair (a, b).
struct DomainReport {
  double normality_a = 0.0;
  double normality_b = 0.0;
  double lattice_distance_a = 0.0;  // max over Sp a of lattice_distance
  double lattice_distance_b = 0.0;
  double ray_distance_a = 0.0;      // max over Sp a of ray_distance
  double ray_distance_b = 0.0;
  double min_modulus_a = 0.0;       // smallest |eigenvalue| of a; 0 means ker a != {0}
  double min_modulus_b = 0.0;
  double phase_relation = 0.0;      // ||(Phase a) b - q b (Phase a)|| / ||b||
  double modulus_relation = 0.0;    // ||(A1 b A1* - lambda^-1 b) P|| / ||b P||, P = non-wrap
  int wrap_dim = 0;                 // dimension excluded from the modulus relation

  /// Predicate with the policy thresholds. With lattice_spectra the spectra
  /// must sit on lattice points, otherwise only on the rays.
  bool passes(const TolerancePolicy& policy, bool lattice_spectra = true) const;
};

/// A candidate pair (a, b) with cached spectral decompositions.
struct GPair {
  LatticeParams lattice;
  ComplexMatrix a;
  ComplexMatrix b;
  SpectralDecomposition spec_a;
  SpectralDecomposition spec_b;
  DomainReport certificate;

  int dim() const { return lattice.dim(); }
};

/// F(g, h) = chi(g, h) / sqrt(NM).
ComplexMatrix fourier_chi(const LatticeParams& p);

/// a = diag(embed), b = F* a F. The columns of spec_b.basis are the
/// b-eigenvectors f_h in group index order with eigenvalue embed(h).
GPair canonical_pair(const LatticeParams& p);

/// Wrap a user-supplied pair; spectra come from normal_eig.
GPair make_gpair(const ComplexMatrix& a, const ComplexMatrix& b, const LatticeParams& p,
                 const TolerancePolicy& policy = default_policy());

DomainReport check_domain(const ComplexMatrix& a, const ComplexMatrix& b, const LatticeParams& p,
                          const TolerancePolicy& policy = default_policy());

/// Scaling step of the lattice-compatible modulus relation, sqrt(N/M).
double modulus_step(const LatticeParams& p);

/// U_t = chi(a, t).
ComplexMatrix char_unitary(const GroupElement& t, const GPair& pair);

struct DualActionResult {
  ComplexMatrix value;
  bool wrap = false;  // gamma moves some modulus index across the window edge
};

/// theta_gamma(X) = L X L* with L e_g = e_{gamma^-1 g}.
DualActionResult dual_action(const GroupElement& gamma, const ComplexMatrix& x,
                             const LatticeParams& p);

/// (id x theta_gamma)(X) for X on K x H.
ComplexMatrix dual_action_leg2(const GroupElement& gamma, const ComplexMatrix& x, int kdim,
                               const LatticeParams& p);

/// X = sum_t g_t(b) U_t; coefficients[t] holds g_t on the b-eigenbasis of the
/// canonical pair, both indexed in group order.
struct WeylDecomposition {
  std::vector<ComplexVector> coefficients;
};

WeylDecomposition weyl_decompose(const ComplexMatrix& x, const GPair& pair);
ComplexMatrix weyl_reconstruct(const WeylDecomposition& w, const GPair& pair);

/// (I x B)* X (I x B) for X on K x H.
ComplexMatrix to_leg2_basis(const ComplexMatrix& x, const ComplexMatrix& basis, int kdim);
ComplexMatrix from_leg2_basis(const ComplexMatrix& x, const ComplexMatrix& basis, int kdim);

/// Relative mass outside the K x K diagonal blocks.
double off_block_mass(const ComplexMatrix& x, int kdim);

struct InvarianceResult {
  double invariance = 0.0;  // max over gamma of ||(id x theta_gamma)X - X|| / ||X||
  double off_block = 0.0;   // off-block mass in the leg-2 b-eigenbasis
  bool implication_holds = true;
};

InvarianceResult invariance_test(const ComplexMatrix& x, int kdim, const GPair& pair);

}  // namespace azb
