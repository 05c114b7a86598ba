#pragma once

namespace azb {

/// Every numerical threshold used by the library in one place. Checks report
/// measured residuals alongside these values; nothing is pass/fail only.
struct TolerancePolicy {
  // linalg-core
  double hermitian = 1e-10;       // ||T - T*|| / ||T|| for hermitian_eig
  double normality = 1e-8;        // ||TT* - T*T|| / ||T||^2 for normal_eig
  double commutation = 1e-8;      // pairwise commutators in joint_diag
  double cluster = 1e-8;          // eigenvalue clustering, relative to ||T||
  double snap = 1e-6;             // lattice / ray snapping distance
  double unitarity = 1e-9;        // ||U*U - I||_F for built unitaries

  // schrodinger-model
  double phase_relation = 1e-10;    // relative
  double modulus_relation = 1e-10;  // relative, non-wrap subspace
  double ray = 1e-6;                // angular distance of a spectrum to the rays

  // mult-unitary / representations
  double build_normality = 1e-6;  // argument of F(. x b) must be normal
  double build_ray = 1e-4;        // and have spectrum on the rays
  double slice_gate = 1e-3;
  double block_gate = 1e-4;
  double character_gate = 1e-6;
  double lattice_match = 0.9;
  double ambiguity = 0.1;  // second-best score within 10% is ambiguous

  // qexp
  double trivial_variance = 1e-3;  // circular variance below this = trivial
  double sum_normality = 0.25;     // S+R is only approximately normal
};

inline const TolerancePolicy& default_policy() {
  static const TolerancePolicy policy{};
  return policy;
}

}  // namespace azb
