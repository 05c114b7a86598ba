#pragma once

#include <random>

#include "azb/linalg.hpp"

namespace azb::testing {

inline ComplexMatrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ComplexMatrix out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) out(r, c) = Complex(gauss(rng), gauss(rng));
  return out;
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

// Haar unitary: QR of a Gaussian matrix with the phases of R's diagonal removed.
inline ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(n, n, rng));
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

}  // namespace azb::testing
