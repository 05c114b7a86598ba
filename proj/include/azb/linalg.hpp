#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "azb/lattice.hpp"
#include "azb/tolerance.hpp"

namespace azb {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

using Clusters = std::vector<std::vector<int>>;

/// T = basis * diag(eigenvalues) * basis^*, with basis unitary.
struct SpectralDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix basis;
  Clusters clusters;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  ComplexMatrix reconstruct() const;
};

/// One unitary basis that diagonalizes every member of a commuting family.
/// diagonals[i] holds the diagonal of basis^* family[i] basis.
struct JointDecomposition {
  ComplexMatrix basis;
  std::vector<ComplexVector> diagonals;
  Clusters clusters;
  double off_diagonal = 0.0;  // worst relative off-diagonal mass over the family
};

// Residual measures. All are Frobenius norms; "relative" variants divide by
// the natural scale and return 0 for a zero matrix.
double frobenius(const ComplexMatrix& x);
double hermiticity_residual(const ComplexMatrix& t);  // ||T - T*|| / ||T||
double normality_residual(const ComplexMatrix& t);    // ||TT* - T*T|| / ||T||^2
double unitarity_residual(const ComplexMatrix& u);    // ||U*U - I||
double commutator_norm(const ComplexMatrix& x, const ComplexMatrix& y);
double off_diagonal_mass(const ComplexMatrix& x);  // ||offdiag|| / ||x||
ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y);

/// Cyclic Jacobi eigensolver for Hermitian matrices. Eigenvalues come back
/// sorted ascending; output is bit-identical for identical input.
SpectralDecomposition hermitian_eig(const ComplexMatrix& t,
                                    const TolerancePolicy& policy = default_policy());

/// Spectral decomposition of a normal matrix by joint diagonalization of
/// (T + T*)/2 and (T - T*)/2i. With sectors > 0 eigenvalues are ordered by
/// phase sector of width 2 pi / sectors, then by modulus; zero comes first.
SpectralDecomposition normal_eig(const ComplexMatrix& t,
                                 const TolerancePolicy& policy = default_policy(),
                                 int sectors = 0);

JointDecomposition joint_diag(const std::vector<ComplexMatrix>& family,
                              const TolerancePolicy& policy = default_policy());

using ScalarFunction = std::function<Complex(Complex)>;
using PairFunction = std::function<Complex(Complex, Complex)>;

enum class Snap { none, ray, lattice };

/// Optional snapping of eigenvalues before a function is evaluated on them,
/// for callers that know the spectrum is lattice- or ray-valued.
struct SnapOptions {
  Snap mode = Snap::none;
  const LatticeParams* lattice = nullptr;
};

/// Replace each eigenvalue by its ray (or lattice) projection; throws
/// DomainError when one is further than policy.snap away.
ComplexVector snap_spectrum(const ComplexVector& eigenvalues, const SnapOptions& snap,
                            const TolerancePolicy& policy = default_policy());

ComplexMatrix funcalc(const SpectralDecomposition& spectrum, const ScalarFunction& f);
ComplexMatrix funcalc(const ComplexMatrix& t, const ScalarFunction& f,
                      const TolerancePolicy& policy = default_policy(),
                      const SnapOptions& snap = {});

/// f evaluated on the joint spectrum of two commuting normal matrices.
ComplexMatrix bifuncalc(const ComplexMatrix& t1, const ComplexMatrix& t2,
                        const PairFunction& f,
                        const TolerancePolicy& policy = default_policy());

/// f(A x I, I x B) for normal A and B given by their decompositions. The joint
/// eigenbasis is the tensor product of the factor bases, so no joint
/// diagonalization of the large operator is needed.
ComplexMatrix kron_funcalc(const SpectralDecomposition& a, const SpectralDecomposition& b,
                           const PairFunction& f);

/// z_T = T (I + T*T)^{-1/2} and its inverse T = Z (I - Z*Z)^{-1/2}.
ComplexMatrix z_transform(const ComplexMatrix& t,
                          const TolerancePolicy& policy = default_policy());
ComplexMatrix z_inverse(const ComplexMatrix& z,
                        const TolerancePolicy& policy = default_policy());

/// Largest singular value.
double operator_norm(const ComplexMatrix& x, const TolerancePolicy& policy = default_policy());

ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y);

enum class LegPattern { l12, l13, l23 };

/// Leg dimensions (d1, d2, d3) of a three-fold tensor product.
using LegDims = std::array<int, 3>;

/// Embed an operator on two legs into the three-fold tensor product, e.g.
/// place_legs(X, l13) acts as X on legs 1 and 3 and as identity on leg 2.
ComplexMatrix place_legs(const ComplexMatrix& x, LegPattern pattern, const LegDims& dims);

}  // namespace azb
