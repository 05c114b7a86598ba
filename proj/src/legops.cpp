#include "azb/legops.hpp"

#include "azb/errors.hpp"

namespace azb {

namespace {

using ColMap = Eigen::Map<ComplexMatrix>;

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

LegSpace::LegSpace(const LegDims& dims) : dims_(dims) {
  for (int d : dims_) require(d > 0, "LegSpace: leg dimensions must be positive");
}

void LegSpace::apply_pair(const ComplexMatrix& op, LegPattern pattern, ComplexMatrix& x) const {
  const auto [d1, d2, d3] = dims_;
  require(x.rows() == total(), "apply_pair: vector length does not match legs");
  switch (pattern) {
    case LegPattern::l12: {
      require(op.rows() == d1 * d2 && op.cols() == d1 * d2, "apply_pair: op does not fit legs 1,2");
      const ComplexMatrix opt = op.transpose();
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        ColMap v(x.col(c).data(), d3, d1 * d2);
        v = (v * opt).eval();
      }
      return;
    }
    case LegPattern::l23: {
      require(op.rows() == d2 * d3 && op.cols() == d2 * d3, "apply_pair: op does not fit legs 2,3");
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        ColMap v(x.col(c).data(), d2 * d3, d1);
        v = (op * v).eval();
      }
      return;
    }
    case LegPattern::l13: {
      require(op.rows() == d1 * d3 && op.cols() == d1 * d3, "apply_pair: op does not fit legs 1,3");
      ComplexVector slice(d1 * d3);
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (int i2 = 0; i2 < d2; ++i2) {
          for (int i1 = 0; i1 < d1; ++i1)
            for (int i3 = 0; i3 < d3; ++i3) slice(i1 * d3 + i3) = x(index(i1, i2, i3), c);
          const ComplexVector out = op * slice;
          for (int i1 = 0; i1 < d1; ++i1)
            for (int i3 = 0; i3 < d3; ++i3) x(index(i1, i2, i3), c) = out(i1 * d3 + i3);
        }
      }
      return;
    }
  }
}

void LegSpace::apply_single(const ComplexMatrix& op, int leg, ComplexMatrix& x) const {
  const auto [d1, d2, d3] = dims_;
  require(leg >= 0 && leg < 3, "apply_single: leg out of range");
  require(op.rows() == dims_[leg] && op.cols() == dims_[leg], "apply_single: op does not fit leg");
  require(x.rows() == total(), "apply_single: vector length does not match legs");
  if (leg == 0) {
    const ComplexMatrix opt = op.transpose();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      ColMap v(x.col(c).data(), d2 * d3, d1);
      v = (v * opt).eval();
    }
  } else if (leg == 2) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      ColMap v(x.col(c).data(), d3, d1 * d2);
      v = (op * v).eval();
    }
  } else {
    const ComplexMatrix opt = op.transpose();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      for (int i1 = 0; i1 < d1; ++i1) {
        ColMap v(x.col(c).data() + static_cast<Eigen::Index>(i1) * d2 * d3, d3, d2);
        v = (v * opt).eval();
      }
    }
  }
}

void LegSpace::apply_diagonal(const ComplexVector& values, ComplexMatrix& x) const {
  require(values.size() == total() && x.rows() == total(), "apply_diagonal: length mismatch");
  x = values.asDiagonal() * x;
}

ComplexMatrix LegSpace::basis_columns(const std::vector<int>& indices) const {
  ComplexMatrix out = ComplexMatrix::Zero(total(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) out(indices[c], c) = 1.0;
  return out;
}

std::vector<int> LegSpace::product_indices(const std::array<std::vector<int>, 3>& keep) const {
  std::vector<int> out;
  out.reserve(keep[0].size() * keep[1].size() * keep[2].size());
  for (int i1 : keep[0])
    for (int i2 : keep[1])
      for (int i3 : keep[2]) out.push_back(index(i1, i2, i3));
  return out;
}

ComplexMatrix select_rows(const ComplexMatrix& x, const std::vector<int>& rows) {
  ComplexMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = x.row(rows[r]);
  return out;
}

}  // namespace azb
