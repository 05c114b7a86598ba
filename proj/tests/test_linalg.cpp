#include <random>

#include "azb/errors.hpp"
#include "azb/linalg.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace azb;
using azb::testing::random_hermitian;
using azb::testing::random_unitary;

TEST_CASE("hermitian_eig examples") {
  const auto id = hermitian_eig(ComplexMatrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(id.eigenvalues(i) - 1.0) < 1e-15);

  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto s = hermitian_eig(d);
  CHECK(s.eigenvalues(0).real() == 1.0);
  CHECK(s.eigenvalues(1).real() == 2.0);
  CHECK(s.eigenvalues(2).real() == 3.0);
}

TEST_CASE("hermitian_eig reconstruction, unitarity and determinism") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix h = random_hermitian(8, rng);
    const auto s = hermitian_eig(h);
    CHECK((s.reconstruct() - h).norm() <= 1e-10 * h.norm());
    CHECK(unitarity_residual(s.basis) <= 1e-12);
    for (int i = 1; i < 8; ++i) CHECK(s.eigenvalues(i).real() >= s.eigenvalues(i - 1).real());
    const auto again = hermitian_eig(h);
    CHECK(again.basis == s.basis);
    CHECK(again.eigenvalues == s.eigenvalues);
  }
}

TEST_CASE("hermitian_eig handles degenerate spectra") {
  std::mt19937_64 rng(3);
  const ComplexMatrix u = random_unitary(6, rng);
  ComplexVector d(6);
  d << 1, 1, 1, -2, -2, 5;
  const ComplexMatrix h = u * d.asDiagonal() * u.adjoint();
  const auto s = hermitian_eig(h);
  CHECK((s.reconstruct() - h).norm() <= 1e-10 * h.norm());
  CHECK(s.clusters.size() == 3);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  ComplexMatrix t = ComplexMatrix::Zero(2, 2);
  t(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(t), DomainError);
}

TEST_CASE("normal_eig recovers a constructed spectrum") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix u = random_unitary(8, rng);
    ComplexVector z(8);
    for (int i = 0; i < 8; ++i) z(i) = Complex(gauss(rng), gauss(rng));
    const ComplexMatrix t = u * z.asDiagonal() * u.adjoint();
    const auto s = normal_eig(t);
    CHECK((s.reconstruct() - t).norm() <= 1e-10 * t.norm());
    CHECK(unitarity_residual(s.basis) <= 1e-12);
    // multiset match
    std::vector<bool> used(8, false);
    for (int i = 0; i < 8; ++i) {
      int best = -1;
      double dist = 1e300;
      for (int j = 0; j < 8; ++j)
        if (!used[j] && std::abs(s.eigenvalues(i) - z(j)) < dist) {
          dist = std::abs(s.eigenvalues(i) - z(j));
          best = j;
        }
      used[best] = true;
      CHECK(dist <= 1e-9);
    }
  }
}

TEST_CASE("normal_eig on a diagonal unitary and with degeneracy") {
  ComplexVector z(4);
  z << Complex(0, 1), Complex(-1, 0), Complex(0, 1), Complex(1, 0);
  const ComplexMatrix t = z.asDiagonal();
  const auto s = normal_eig(t);
  CHECK((s.reconstruct() - t).norm() == doctest::Approx(0.0).epsilon(1e-15));
  std::mt19937_64 rng(5);
  const ComplexMatrix u = random_unitary(4, rng);
  const ComplexMatrix t2 = u * t * u.adjoint();
  const auto s2 = normal_eig(t2, default_policy(), 4);
  CHECK((s2.reconstruct() - t2).norm() <= 1e-10 * t2.norm());
  // sector ordering: 1, i, i, -1
  CHECK(std::abs(s2.eigenvalues(0) - 1.0) < 1e-10);
  CHECK(std::abs(s2.eigenvalues(3) + 1.0) < 1e-10);
}

TEST_CASE("normal_eig rejects non-normal input") {
  ComplexMatrix t = ComplexMatrix::Zero(2, 2);
  t(0, 1) = 1.0;
  t(0, 0) = 1.0;
  CHECK_THROWS_AS(normal_eig(t), DomainError);
}

TEST_CASE("joint_diag") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss;
  const ComplexMatrix u = random_unitary(8, rng);
  ComplexVector d1(8), d2(8), d3(8);
  // degenerate first member so the refinement has work to do
  d1 << 1, 1, 1, 1, 2, 2, 3, 3;
  for (int i = 0; i < 8; ++i) {
    d2(i) = gauss(rng);
    d3(i) = Complex(gauss(rng), gauss(rng));
  }
  const std::vector<ComplexMatrix> family = {u * d1.asDiagonal() * u.adjoint(),
                                             u * d2.asDiagonal() * u.adjoint(),
                                             u * d3.asDiagonal() * u.adjoint()};
  const auto j = joint_diag(family);
  CHECK(j.off_diagonal <= 1e-8);
  CHECK(unitarity_residual(j.basis) <= 1e-12);

  const auto trivial = joint_diag({ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(3, 3)});
  CHECK(trivial.off_diagonal == 0.0);

  const auto diag = joint_diag({ComplexMatrix(d2.asDiagonal()), ComplexMatrix(d3.asDiagonal())});
  CHECK(diag.off_diagonal <= 1e-14);

  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK_THROWS_AS(joint_diag({x, z}), DomainError);
}

TEST_CASE("funcalc rules") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  const ComplexMatrix u = random_unitary(6, rng);
  ComplexVector z(6);
  for (int i = 0; i < 6; ++i) z(i) = Complex(gauss(rng), gauss(rng));
  const ComplexMatrix t = u * z.asDiagonal() * u.adjoint();

  CHECK((funcalc(t, [](Complex) { return Complex(1.0); }) - ComplexMatrix::Identity(6, 6)).norm() <
        1e-10);
  CHECK((funcalc(t, [](Complex w) { return w; }) - t).norm() <= 1e-10 * t.norm());
  CHECK((funcalc(t, [](Complex w) { return std::conj(w); }) - t.adjoint()).norm() <=
        1e-10 * t.norm());
  const ComplexMatrix phase = funcalc(t, [](Complex w) { return w / std::abs(w); });
  CHECK(unitarity_residual(phase) <= 1e-10);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  const ComplexMatrix sq = funcalc(d, [](Complex w) { return w * w; });
  CHECK(std::abs(sq(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(sq(1, 1) - 4.0) < 1e-14);

  // multiplicativity
  auto f = [](Complex w) { return std::exp(w); };
  auto g = [](Complex w) { return w * w + 1.0; };
  const ComplexMatrix lhs = funcalc(t, [&](Complex w) { return f(w) * g(w); });
  const ComplexMatrix rhs = funcalc(t, f) * funcalc(t, g);
  CHECK((lhs - rhs).norm() <= 1e-9 * lhs.norm());
}

TEST_CASE("bifuncalc") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> gauss;
  const ComplexMatrix u = random_unitary(6, rng);
  ComplexVector z1(6), z2(6);
  for (int i = 0; i < 6; ++i) {
    z1(i) = Complex(gauss(rng), gauss(rng));
    z2(i) = Complex(gauss(rng), gauss(rng));
  }
  const ComplexMatrix t1 = u * z1.asDiagonal() * u.adjoint();
  const ComplexMatrix t2 = u * z2.asDiagonal() * u.adjoint();
  CHECK((bifuncalc(t1, t2, [](Complex a, Complex) { return a; }) - t1).norm() <= 1e-10 * t1.norm());
  const ComplexMatrix prod = bifuncalc(ComplexMatrix(z1.asDiagonal()), ComplexMatrix(z2.asDiagonal()),
                                       [](Complex a, Complex b) { return a * b; });
  for (int i = 0; i < 6; ++i) CHECK(std::abs(prod(i, i) - z1(i) * z2(i)) < 1e-12);
}

TEST_CASE("z-transform") {
  CHECK(z_transform(ComplexMatrix::Zero(3, 3)).norm() == 0.0);
  const ComplexMatrix zi = z_transform(ComplexMatrix::Identity(3, 3));
  CHECK((zi - ComplexMatrix::Identity(3, 3) / std::sqrt(2.0)).norm() < 1e-14);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix u = random_unitary(8, rng);
    ComplexVector z(8);
    for (int i = 0; i < 8; ++i) z(i) = Complex(gauss(rng), gauss(rng)) * 3.0;
    const ComplexMatrix t = u * z.asDiagonal() * u.adjoint();
    const ComplexMatrix zt = z_transform(t);
    CHECK(operator_norm(zt) <= 1.0);
    CHECK((z_inverse(zt) - t).norm() <= 1e-10 * t.norm());
  }
  CHECK_THROWS_AS(z_inverse(ComplexMatrix::Identity(2, 2)), DomainError);
}

TEST_CASE("kron and place_legs") {
  std::mt19937_64 rng(29);
  const ComplexMatrix x = random_unitary(4, rng);
  CHECK((place_legs(ComplexMatrix::Identity(4, 4), LegPattern::l13, {2, 3, 2}) -
         ComplexMatrix::Identity(12, 12))
            .norm() == 0.0);
  CHECK((place_legs(x, LegPattern::l12, {2, 2, 1}) - x).norm() == 0.0);

  // Oracle for pattern 13: conjugate X x I by the explicit 2<->3 leg swap.
  const int d = 2;
  ComplexMatrix swap = ComplexMatrix::Zero(8, 8);
  for (int i1 = 0; i1 < d; ++i1)
    for (int i2 = 0; i2 < d; ++i2)
      for (int i3 = 0; i3 < d; ++i3) swap((i1 * d + i3) * d + i2, (i1 * d + i2) * d + i3) = 1.0;
  const ComplexMatrix x12 = kron(x, ComplexMatrix::Identity(2, 2));
  CHECK((place_legs(x, LegPattern::l13, {2, 2, 2}) - swap * x12 * swap.transpose()).norm() < 1e-14);

  const ComplexMatrix y = random_unitary(4, rng);
  const ComplexMatrix one = kron(random_unitary(2, rng), ComplexMatrix::Identity(4, 4));
  const ComplexMatrix y23 = place_legs(y, LegPattern::l23, {2, 2, 2});
  CHECK((one * y23 - y23 * one).norm() < 1e-13);
  CHECK_THROWS_AS(place_legs(x, LegPattern::l23, {2, 3, 2}), ParameterError);
}
