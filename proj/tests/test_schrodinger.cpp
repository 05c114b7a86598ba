#include <numbers>
#include <random>

#include "azb/schrodinger.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace azb;
using azb::testing::random_gaussian;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent brute-force construction of the canonical b:
// b(g, g') = (1/NM) sum_h conj(chi(h, g)) embed(h) chi(h, g').
ComplexMatrix oracle_b(int n, int m) {
  const int j0 = m / 2;
  const int d = n * m;
  const double lambda = std::exp(2 * kPi / std::sqrt(double(n) * m));
  auto chi_ = [&](int k, int j, int k2, int j2) {
    return std::exp(Complex(0.0, 2 * kPi * k * k2 / n - 2 * kPi * j * j2 / m));
  };
  ComplexMatrix b = ComplexMatrix::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      Complex s = 0.0;
      for (int h = 0; h < d; ++h) {
        const int kh = h / m, jh = h % m - j0;
        const Complex e = std::pow(lambda, jh) * std::exp(Complex(0.0, 2 * kPi * kh / n));
        s += std::conj(chi_(kh, jh, r / m, r % m - j0)) * e * chi_(kh, jh, c / m, c % m - j0);
      }
      b(r, c) = s / double(d);
    }
  return b;
}

}  // namespace

TEST_CASE("fourier_chi") {
  for (int m : {2, 3}) {
    const LatticeParams p = make_lattice(6, m);
    const ComplexMatrix f = fourier_chi(p);
    const int d = p.dim();
    CHECK(unitarity_residual(f) <= 1e-12);
    const int e = index_of({0, 0}, p);
    for (int c = 0; c < d; ++c) CHECK(std::abs(f(e, c) - 1.0 / std::sqrt(double(d))) < 1e-15);
    // F^2 is the inversion permutation, so F^4 = I.
    const ComplexMatrix f2 = f * f;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const bool inverse = mul(element_at(r, p), element_at(c, p), p).value == GroupElement{0, 0};
        CHECK(std::abs(f2(r, c) - (inverse ? 1.0 : 0.0)) < 1e-12);
      }
    CHECK((f2 * f2 - ComplexMatrix::Identity(d, d)).norm() < 1e-12);
  }
}

TEST_CASE("canonical pair relations") {
  for (int m : {2, 3, 4}) {
    const LatticeParams p = make_lattice(6, m);
    const GPair pair = canonical_pair(p);
    CHECK((pair.b - oracle_b(6, m)).norm() < 1e-12 * pair.b.norm());
    CHECK(std::abs(pair.a(index_of({0, 0}, p), index_of({0, 0}, p)) - 1.0) < 1e-15);
    const DomainReport& r = pair.certificate;
    CHECK(r.phase_relation <= 1e-10);
    CHECK(r.modulus_relation <= 1e-10);
    CHECK(r.wrap_dim == p.n);
    CHECK(r.normality_a <= 1e-14);
    CHECK(r.normality_b <= 1e-12);
    CHECK(r.lattice_distance_b <= 1e-10);
    CHECK(r.min_modulus_b == doctest::Approx(std::pow(p.lambda, -p.j0)).epsilon(1e-10));
    CHECK(r.passes(default_policy()));

    // Sp b = Sp a as multisets
    const SpectralDecomposition sb = normal_eig(pair.b, default_policy(), p.n);
    const SpectralDecomposition sa = normal_eig(pair.a, default_policy(), p.n);
    for (int i = 0; i < p.dim(); ++i) CHECK(std::abs(sb.eigenvalues(i) - sa.eigenvalues(i)) <= 1e-10);
  }
}

TEST_CASE("commuting pair violates the phase relation") {
  const LatticeParams p = make_lattice(6, 2);
  const GPair pair = canonical_pair(p);
  const DomainReport r = check_domain(pair.a, pair.a, p);
  CHECK(r.phase_relation == doctest::Approx(std::abs(1.0 - p.q)).epsilon(1e-10));
  CHECK_FALSE(r.passes(default_policy()));
}

TEST_CASE("check_domain on a user-supplied pair") {
  const LatticeParams p = make_lattice(6, 2);
  const GPair canon = canonical_pair(p);
  const GPair pair = make_gpair(canon.a, canon.b, p);
  CHECK(pair.certificate.phase_relation <= 1e-10);
  CHECK(pair.certificate.modulus_relation <= 1e-10);
}

TEST_CASE("char_unitary and sigma covariance") {
  const LatticeParams p = make_lattice(6, 3);
  const GPair pair = canonical_pair(p);
  const int d = p.dim();
  CHECK((char_unitary({0, 0}, pair) - ComplexMatrix::Identity(d, d)).norm() < 1e-15);
  for (const GroupElement& t : elements(p)) {
    const ComplexMatrix u = char_unitary(t, pair);
    CHECK(unitarity_residual(u) < 1e-12);
    CHECK((u * char_unitary(inv(t, p).value, pair) - ComplexMatrix::Identity(d, d)).norm() < 1e-12);
    for (const GroupElement& s : elements(p)) {
      const auto ts = mul(t, s, p);
      if (ts.wrap) continue;
      CHECK((u * char_unitary(s, pair) - char_unitary(ts.value, pair)).norm() < 1e-12);
    }
    // U_t b U_t* = t b on the b-eigenvectors f_h with h t wrap-free.
    const ComplexMatrix lhs = u * pair.b * u.adjoint();
    const ComplexMatrix rhs = embed(t, p) * pair.b;
    for (int h = 0; h < d; ++h) {
      if (mul(element_at(h, p), t, p).wrap) continue;
      const ComplexVector f = pair.spec_b.basis.col(h);
      CHECK((lhs * f - rhs * f).norm() <= 1e-9 * std::abs(embed(t, p)) * pair.b.norm());
    }
  }
}

TEST_CASE("dual action") {
  const LatticeParams p = make_lattice(6, 3);
  const GPair pair = canonical_pair(p);
  const int d = p.dim();
  std::mt19937_64 rng(37);
  const ComplexMatrix x = random_gaussian(d, d, rng);
  CHECK(dual_action({0, 0}, x, p).value == x);
  for (const GroupElement& g : elements(p)) {
    CHECK((dual_action(g, pair.b, p).value - pair.b).norm() <= 1e-12 * pair.b.norm());
    for (const GroupElement& t : elements(p)) {
      const ComplexMatrix u = char_unitary(t, pair);
      CHECK((dual_action(g, u, p).value - chi(g, t, p) * u).norm() <= 1e-10);
    }
    const ComplexMatrix moved = dual_action(g, pair.a, p).value;
    for (int i = 0; i < d; ++i) {
      if (mul(g, element_at(i, p), p).wrap) continue;
      CHECK(std::abs(moved(i, i) - embed(g, p) * pair.a(i, i)) <= 1e-10 * std::abs(moved(i, i)));
    }
    for (const GroupElement& h : elements(p)) {
      const auto gh = mul(g, h, p);
      if (gh.wrap) continue;
      const ComplexMatrix two = dual_action(g, dual_action(h, x, p).value, p).value;
      CHECK((two - dual_action(gh.value, x, p).value).norm() <= 1e-10 * x.norm());
    }
  }
}

TEST_CASE("Weyl decomposition") {
  const LatticeParams p = make_lattice(6, 2);
  const GPair pair = canonical_pair(p);
  const int d = p.dim();
  const GroupElement t{2, 1};
  const WeylDecomposition wu = weyl_decompose(char_unitary(t, pair), pair);
  for (int s = 0; s < d; ++s) {
    const double expected = s == index_of(t, p) ? 1.0 : 0.0;
    for (int r = 0; r < d; ++r) CHECK(std::abs(wu.coefficients[s](r) - expected) < 1e-12);
  }
  const ComplexMatrix gb = funcalc(pair.spec_b, [](Complex z) { return z * z; });
  const WeylDecomposition wg = weyl_decompose(gb, pair);
  for (int s = 0; s < d; ++s)
    if (s != index_of({0, 0}, p)) CHECK(wg.coefficients[s].norm() < 1e-10);

  std::mt19937_64 rng(41);
  const ComplexMatrix x = random_gaussian(d, d, rng);
  CHECK((weyl_reconstruct(weyl_decompose(x, pair), pair) - x).norm() <= 1e-10 * x.norm());
  double worst = 0.0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(r, c) = 1.0;
      worst = std::max(worst, (weyl_reconstruct(weyl_decompose(e, pair), pair) - e).norm());
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("invariance test") {
  const LatticeParams p = make_lattice(6, 2);
  const GPair pair = canonical_pair(p);
  const int d = p.dim();
  std::mt19937_64 rng(43);
  const int k = 3;
  const ComplexMatrix y = random_gaussian(k, k, rng);
  const ComplexMatrix gb = funcalc(pair.spec_b, [](Complex z) { return std::sqrt(z); });
  const auto inv1 = invariance_test(kron(y, gb), k, pair);
  CHECK(inv1.invariance <= 1e-12);
  CHECK(inv1.off_block <= 1e-12);
  CHECK(inv1.implication_holds);

  const auto inv2 = invariance_test(kron(y, char_unitary({1, 0}, pair)), k, pair);
  CHECK(inv2.invariance > 0.5);
  CHECK(inv2.implication_holds);

  ComplexMatrix blocks = ComplexMatrix::Zero(k * d, k * d);
  for (int beta = 0; beta < d; ++beta) {
    const ComplexVector f = pair.spec_b.basis.col(beta);
    blocks += kron(random_gaussian(k, k, rng), f * f.adjoint());
  }
  const auto inv3 = invariance_test(blocks, k, pair);
  CHECK(inv3.invariance <= 1e-9);
  CHECK(inv3.off_block <= 1e-8);
  CHECK(inv3.implication_holds);
}
