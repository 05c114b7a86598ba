#include <cmath>
#include <numbers>

#include "azb/errors.hpp"
#include "azb/lattice.hpp"
#include "doctest.h"

using namespace azb;

namespace {

constexpr double kPi = std::numbers::pi;

// Modulus clause evaluated from its definition |g|^{N/(2 pi i) log r}
// = exp(-i N log|g| log r / (2 pi)), independent of the library formula.
Complex modulus_clause(double g_modulus, double r, int n) {
  return std::exp(Complex(0.0, -n * std::log(g_modulus) * std::log(r) / (2.0 * kPi)));
}

}  // namespace

TEST_CASE("make_lattice populates the parameters") {
  const LatticeParams p = make_lattice(6, 3);
  CHECK(std::abs(p.q - std::exp(Complex(0.0, kPi / 3.0))) < 1e-15);
  CHECK(p.hbar == doctest::Approx(kPi / 3.0).epsilon(1e-15));
  CHECK(p.lambda == doctest::Approx(4.3973).epsilon(1e-4));
  CHECK(p.j0 == 1);
  const double lhs = 6.0 / (2.0 * kPi) * std::pow(std::log(p.lambda), 2);
  CHECK(lhs == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-14));
}

TEST_CASE("make_lattice rejects bad parameters") {
  CHECK_THROWS_AS(make_lattice(5, 3), ParameterError);
  CHECK_THROWS_AS(make_lattice(4, 3), ParameterError);
  CHECK_THROWS_AS(make_lattice(6, 1), ParameterError);
}

TEST_CASE("q is a primitive N-th root of unity") {
  for (int n : {6, 8, 10}) {
    const LatticeParams p = make_lattice(n, 2);
    CHECK(std::abs(std::pow(p.q, n) - 1.0) < 1e-12);
    for (int k = 1; k < n; ++k) CHECK(std::abs(std::pow(p.q, k) - 1.0) > 1e-3);
  }
}

TEST_CASE("embed samples the rays") {
  const LatticeParams p = make_lattice(6, 3);
  CHECK(std::abs(embed(GroupElement{0, 0}, p) - 1.0) < 1e-15);
  CHECK(std::abs(embed(GroupElement{1, 0}, p) - std::exp(Complex(0.0, kPi / 3.0))) < 1e-15);
  CHECK(std::abs(embed(GroupElement{0, 1}, p) - p.lambda) < 1e-12);
  CHECK(embed(ClosedPoint{}, p) == Complex(0.0));
  for (const GroupElement& g : elements(p)) {
    const double sector = std::arg(embed(g, p)) / p.hbar;
    CHECK(std::abs(sector - std::round(sector)) < 1e-12);
  }
}

TEST_CASE("window arithmetic") {
  const LatticeParams p = make_lattice(6, 3);
  auto r = mul({1, 0}, {5, 0}, p);
  CHECK(r.value == GroupElement{0, 0});
  CHECK_FALSE(r.wrap);
  r = mul({0, 1}, {0, -1}, p);
  CHECK(r.value == GroupElement{0, 0});
  CHECK_FALSE(r.wrap);
  r = mul({0, p.j_max()}, {0, 1}, p);
  CHECK(r.wrap);
  CHECK(in_window(r.value, p));

  // Brute force: wrap is set exactly when the plain sum leaves the window.
  for (const GroupElement& g : elements(p))
    for (const GroupElement& h : elements(p)) {
      const auto m = mul(g, h, p);
      const int s = g.j + h.j;
      CHECK(m.wrap == (s < p.j_min() || s > p.j_max()));
      if (!m.wrap) {
        CHECK(std::abs(embed(m.value, p) - embed(g, p) * embed(h, p)) <
              1e-12 * std::abs(embed(m.value, p)));
      }
    }
}

TEST_CASE("inverse") {
  const LatticeParams p = make_lattice(6, 4);
  for (const GroupElement& g : elements(p)) {
    const auto i = inv(g, p);
    CHECK(i.wrap == (g.j == p.j_min()));
    CHECK(mul(g, i.value, p).value == GroupElement{0, 0});
  }
}

TEST_CASE("index round trip") {
  const LatticeParams p = make_lattice(8, 3);
  for (int i = 0; i < p.dim(); ++i) CHECK(index_of(element_at(i, p), p) == i);
}

TEST_CASE("chi examples") {
  const LatticeParams p = make_lattice(6, 3);
  CHECK(std::abs(chi({1, 0}, {1, 0}, p) - std::exp(Complex(0.0, kPi / 3.0))) < 1e-15);
  for (const GroupElement& g : elements(p)) CHECK(std::abs(chi({0, 0}, g, p) - 1.0) < 1e-15);
  CHECK(std::abs(chi({0, 1}, {0, 1}, p) - std::exp(Complex(0.0, -2.0 * kPi / 3.0))) < 1e-14);
}

TEST_CASE("chi matches the two defining clauses by brute force") {
  for (int m : {2, 3, 4}) {
    const LatticeParams p = make_lattice(6, m);
    for (const GroupElement& g : elements(p))
      for (const GroupElement& h : elements(p)) {
        // chi(g, h) = Phase(g)^{k'} * |g|^{N/(2 pi i) log |h|}
        const Complex phase_part = std::pow(std::exp(Complex(0.0, 2.0 * kPi / 6.0)), g.k * h.k);
        const Complex modulus_part =
            modulus_clause(std::pow(p.lambda, g.j), std::pow(p.lambda, h.j), p.n);
        CHECK(std::abs(chi(g, h, p) - phase_part * modulus_part) < 1e-12);
      }
  }
}

TEST_CASE("chi is a symmetric nondegenerate bicharacter") {
  const LatticeParams p = make_lattice(6, 3);
  const auto all = elements(p);
  for (const GroupElement& g : all)
    for (const GroupElement& h : all) {
      CHECK(std::abs(chi(g, h, p) - chi(h, g, p)) < 1e-12);
      CHECK(std::abs(std::abs(chi(g, h, p)) - 1.0) < 1e-12);
      for (const GroupElement& e : all) {
        const auto gh = mul(g, h, p);
        if (gh.wrap) continue;
        CHECK(std::abs(chi(gh.value, e, p) - chi(g, e, p) * chi(h, e, p)) < 1e-12);
        CHECK(std::abs(chi(e, gh.value, p) - chi(e, g, p) * chi(e, h, p)) < 1e-12);
      }
    }
  for (const GroupElement& g : all) {
    bool trivial = true;
    for (const GroupElement& h : all) trivial = trivial && std::abs(chi(g, h, p) - 1.0) < 1e-12;
    CHECK(trivial == (g == GroupElement{0, 0}));
  }
}

TEST_CASE("chi_ray extends chi along the rays") {
  const LatticeParams p = make_lattice(6, 3);
  for (const GroupElement& g : elements(p))
    for (const GroupElement& h : elements(p))
      CHECK(std::abs(chi_ray(embed(g, p), h, p) - chi(g, h, p)) < 1e-12);
  for (const GroupElement& h : elements(p)) CHECK(std::abs(chi_ray(1.0, h, p) - 1.0) < 1e-15);
  CHECK(std::abs(chi_ray(std::sqrt(p.lambda), {0, 1}, p) - std::exp(Complex(0.0, -kPi / 3.0))) <
        1e-12);
  CHECK(chi_ray(0.0, {1, 1}, p) == Complex(1.0));
  CHECK_THROWS_AS(chi_ray(std::polar(1.0, 0.3), {0, 1}, p), DomainError);
}

TEST_CASE("chi_rays is symmetric and agrees with chi") {
  const LatticeParams p = make_lattice(6, 2);
  for (const GroupElement& g : elements(p))
    for (const GroupElement& h : elements(p))
      CHECK(std::abs(chi_rays(embed(g, p), embed(h, p), p) - chi(g, h, p)) < 1e-12);
  const Complex z1 = std::polar(1.7, p.hbar * 2);
  const Complex z2 = std::polar(0.4, p.hbar * 5);
  CHECK(std::abs(chi_rays(z1, z2, p) - chi_rays(z2, z1, p)) < 1e-14);
}

TEST_CASE("distances to rays and lattice") {
  const LatticeParams p = make_lattice(6, 2);
  CHECK(ray_distance(0.0, p) == 0.0);
  CHECK(ray_distance(embed(GroupElement{3, 1}, p), p) < 1e-14);
  CHECK(ray_distance(std::polar(2.0, p.hbar / 2), p) == doctest::Approx(p.hbar / 2));
  CHECK(lattice_distance(embed(GroupElement{2, -1}, p), p) < 1e-14);
  CHECK(lattice_distance(std::sqrt(p.lambda), p) > 0.1);
}

TEST_CASE("bulk window") {
  CHECK(bulk_moduli(make_lattice(6, 2)) == std::vector<int>{0});
  CHECK(bulk_moduli(make_lattice(6, 3)) == std::vector<int>{0});
  CHECK(bulk_moduli(make_lattice(6, 4)) == std::vector<int>{-1, 0});
  CHECK(bulk_moduli(make_lattice(6, 4), 1.0) == std::vector<int>{-2, -1, 0, 1});
  CHECK(bulk_indices(make_lattice(6, 2)).size() == 6);
  CHECK_THROWS_AS(bulk_moduli(make_lattice(6, 4), 0.0), ParameterError);
}
