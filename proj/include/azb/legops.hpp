#pragma once

#include "azb/linalg.hpp"

namespace azb {

/// Operators applied to batches of vectors on a three-fold tensor product
/// without forming the (d1 d2 d3)^2 matrix. Columns of `x` are vectors with
/// index (i1 * d2 + i2) * d3 + i3.
class LegSpace {
 public:
  explicit LegSpace(const LegDims& dims);

  const LegDims& dims() const { return dims_; }
  int total() const { return dims_[0] * dims_[1] * dims_[2]; }
  int index(int i1, int i2, int i3) const { return (i1 * dims_[1] + i2) * dims_[2] + i3; }

  /// x <- (op on the two given legs) x
  void apply_pair(const ComplexMatrix& op, LegPattern pattern, ComplexMatrix& x) const;
  /// x <- (op on leg `leg`, 0-based) x
  void apply_single(const ComplexMatrix& op, int leg, ComplexMatrix& x) const;
  /// x <- diag(values) x with values indexed like the rows of x
  void apply_diagonal(const ComplexVector& values, ComplexMatrix& x) const;

  /// Standard basis columns for the listed flat indices.
  ComplexMatrix basis_columns(const std::vector<int>& indices) const;
  /// Flat indices (i1, i2, i3) with i_l in keep[l].
  std::vector<int> product_indices(const std::array<std::vector<int>, 3>& keep) const;

 private:
  LegDims dims_;
};

/// Rows `rows` of x.
ComplexMatrix select_rows(const ComplexMatrix& x, const std::vector<int>& rows);

}  // namespace azb
