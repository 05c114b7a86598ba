#include <random>

#include "azb/legops.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace azb;
using azb::testing::random_gaussian;

TEST_CASE("structured leg application matches place_legs") {
  std::mt19937_64 rng(31);
  const LegDims dims = {2, 3, 4};
  const LegSpace space(dims);
  const ComplexMatrix x = random_gaussian(space.total(), 5, rng);

  const ComplexMatrix op12 = random_gaussian(6, 6, rng);
  const ComplexMatrix op13 = random_gaussian(8, 8, rng);
  const ComplexMatrix op23 = random_gaussian(12, 12, rng);
  for (auto [op, pattern] : {std::pair{op12, LegPattern::l12}, std::pair{op13, LegPattern::l13},
                             std::pair{op23, LegPattern::l23}}) {
    ComplexMatrix y = x;
    space.apply_pair(op, pattern, y);
    CHECK((y - place_legs(op, pattern, dims) * x).norm() < 1e-12 * y.norm());
  }

  const ComplexMatrix o1 = random_gaussian(2, 2, rng);
  const ComplexMatrix o2 = random_gaussian(3, 3, rng);
  const ComplexMatrix o3 = random_gaussian(4, 4, rng);
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix i4 = ComplexMatrix::Identity(4, 4);
  const std::array<ComplexMatrix, 3> dense = {kron(kron(o1, i3), i4), kron(kron(i2, o2), i4),
                                              kron(kron(i2, i3), o3)};
  const std::array<ComplexMatrix, 3> ops = {o1, o2, o3};
  for (int leg = 0; leg < 3; ++leg) {
    ComplexMatrix y = x;
    space.apply_single(ops[leg], leg, y);
    CHECK((y - dense[leg] * x).norm() < 1e-12 * y.norm());
  }
}

TEST_CASE("basis columns and product indices") {
  const LegSpace space({2, 2, 3});
  const auto idx = space.product_indices({std::vector<int>{1}, std::vector<int>{0, 1}, std::vector<int>{2}});
  CHECK(idx == std::vector<int>{space.index(1, 0, 2), space.index(1, 1, 2)});
  const ComplexMatrix e = space.basis_columns(idx);
  CHECK(e.cols() == 2);
  CHECK(e(idx[1], 1) == Complex(1.0));
  CHECK(select_rows(e, idx) == ComplexMatrix::Identity(2, 2));
}
