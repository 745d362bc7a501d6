#include <cmath>

#include "doctest.h"
#include "htlab/counterexample.hpp"
#include "htlab/errors.hpp"
#include "htlab/twisted.hpp"

using namespace htlab;

TEST_CASE("rational arithmetic") {
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(0, 5) == Rational(0));
  CHECK(Rational(0, 5).den == 1);
  CHECK(Rational(9, 4).str() == "9/4");
  CHECK(Rational(10).str() == "10");
  CHECK(Rational::parse("3") == Rational(3));
  CHECK(Rational::parse("-6/8") == Rational(-3, 4));
  CHECK_THROWS_AS(Rational::parse("3x"), DomainError);
  CHECK_THROWS_AS(Rational::parse("1/0"), DomainError);
  CHECK(Rational(3, 2) * Rational(4, 9) == Rational(2, 3));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(10) > Rational(9));
  CHECK_FALSE(Rational(9) > Rational(9));
}

TEST_CASE("exact ratio table") {
  const Grid g = Grid::symmetric(2, 12.0, 65);
  CHECK(counterexample_row({0}, {0}, g).ratio == Rational(1));
  CHECK(counterexample_row({0}, {9}, g).ratio == Rational(10));
  const Grid g2 = Grid::symmetric(4, 8.0, 9);
  const auto r = counterexample_row({1, 0}, {3, 3}, g2);
  CHECK(r.ratio == Rational(9, 4));
  CHECK(r.eig_h == 9);
  CHECK(r.eig_a == 4);
  for (int m = 0; m <= 12; ++m) CHECK(counterexample_row({0}, {m}, g).ratio == Rational(m + 1));
}

TEST_CASE("quadratic forms on the default n = 1 grid") {
  const Grid g = desk_grid(1);
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      const auto r = counterexample_row({a}, {b}, g);
      CHECK(r.eig_error < 1e-3);
      CHECK(r.identity_error < 1e-3);
      CHECK(r.summands_ok);
      CHECK(r.form_h == doctest::Approx(r.grad_sq + r.potential).epsilon(1e-3));
    }
}

TEST_CASE("quadratic forms on the default n = 2 grid") {
  const Grid g = desk_grid(2);
  for (const auto& [nu, nup] : std::vector<std::pair<MultiIndex, MultiIndex>>{{{0, 0}, {0, 0}}, {{1, 0}, {3, 3}}}) {
    const auto r = counterexample_row(nu, nup, g);
    CHECK(r.eig_error < 1e-3);
    CHECK(r.identity_error < 1e-3);
    CHECK(r.summands_ok);
  }
}

TEST_CASE("row preconditions") {
  const Grid g = Grid::symmetric(2, 12.0, 65);
  CHECK_THROWS_AS(counterexample_row({0}, {21}, g), BudgetError);
  CHECK_THROWS_AS(counterexample_row({0, 0}, {1, 0}, g), GridMismatch);
  CHECK_THROWS_AS(counterexample_row({0}, {1, 0}, g), DomainError);
  CHECK_THROWS_AS(counterexample_row({-1}, {0}, g), DomainError);
  CHECK_THROWS_AS(counterexample_row({0}, {0}, Grid::symmetric(2, 12.0, 64)), GridMismatch);
}

TEST_CASE("refutation scans") {
  std::vector<int> ladder;
  for (int m = 0; m <= 12; ++m) ladder.push_back(m);
  const auto r3 = refutation_scan(1, {0}, ladder, Rational(3));
  CHECK(r3.target == Rational(9));
  REQUIRE(r3.first >= 0);
  CHECK(r3.steps[r3.first].level == 9);
  CHECK(r3.steps[r3.first].ratio == Rational(10));
  CHECK(r3.increasing);
  CHECK_FALSE(r3.inconclusive);
  for (int n : {1, 2, 3}) {
    const auto r1 = refutation_scan(n, MultiIndex(n, 0), ladder, Rational(1));
    REQUIRE(r1.first >= 0);
    CHECK(r1.steps[r1.first].level == 1);
  }
  for (int C : {2, 5, 10, 40}) {
    std::vector<int> long_ladder;
    for (int m = 0; m <= 20000; m += 7) long_ladder.push_back(m);
    const auto r = refutation_scan(2, {1, 2}, long_ladder, Rational(C));
    REQUIRE_FALSE(r.inconclusive);
    CHECK(r.steps[r.first].ratio > Rational(C * C));
    if (r.first > 0) CHECK_FALSE(r.steps[r.first - 1].ratio > Rational(C * C));
  }
  const auto short_scan = refutation_scan(1, {0}, {0, 1, 2}, Rational(3));
  CHECK(short_scan.inconclusive);
  CHECK(short_scan.first == -1);
  CHECK(refutation_scan(1, {0}, ladder, Rational(3, 2)).target == Rational(9, 4));
  CHECK_THROWS_AS(refutation_scan(1, {0}, {0, 2, 2}, Rational(3)), DomainError);
  CHECK_THROWS_AS(refutation_scan(1, {0}, {0, 1}, Rational(0)), DomainError);
  CHECK_THROWS_AS(refutation_scan(2, {0}, {0, 1}, Rational(2)), DomainError);
}

TEST_CASE("discrete Fourier transform of a Gaussian") {
  const Grid g = Grid::symmetric(2, 12.0, 129);
  const GridFunction f = GridFunction::sample(g, [](const double* z) { return cplx(std::exp(-0.25 * (z[0] * z[0] + z[1] * z[1])), 0.0); });
  const GridFunction F = fourier_transform(f);
  // int exp(-|z|^2 / 4) exp(-i zeta.z) dz = 4 pi exp(-|zeta|^2)
  const GridFunction want = GridFunction::sample(F.grid, [](const double* z) { return cplx(4 * M_PI * std::exp(-(z[0] * z[0] + z[1] * z[1])), 0.0); });
  CHECK(distance(F, want) / norm(want) < 1e-12);
  CHECK(F.grid.axis(0).spacing() == doctest::Approx(2 * M_PI / (129 * g.axis(0).spacing())).epsilon(1e-14));
}

TEST_CASE("Fourier conjugation of A") {
  const auto r0 = fourier_conjugation_check({0}, {0}, desk_grid(1));
  CHECK(r0.relative < 1e-3);
  CHECK(r0.rescaling < 1e-3);
  const Grid g = conjugation_grid();
  for (const auto& [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {0, 5}, {3, 3}}) {
    const auto r = fourier_conjugation_check({a}, {b}, g);
    CHECK(r.relative < 1e-3);
    CHECK(r.rescaling < 1e-3);
  }
  const auto zero = fourier_conjugation_check({1}, {1}, g, 0.0);
  CHECK(zero.residual == 0.0);
  CHECK(zero.relative == 0.0);
  const auto one = fourier_conjugation_check({1}, {2}, g);
  const auto three = fourier_conjugation_check({1}, {2}, g, cplx(0.0, 3.0));
  CHECK(three.residual == doctest::Approx(3 * one.residual).epsilon(1e-10));
  CHECK(three.relative == doctest::Approx(one.relative).epsilon(1e-10));
}

TEST_CASE("A^ is the advertised operator") {
  // For G = exp(-|zeta|^2): -Delta G / 4 = (1 - |zeta|^2) G and the rotation term
  // vanishes on radial functions, so A^ G = G.
  const Grid g = Grid::symmetric(2, 6.0, 121);
  const GridFunction G = GridFunction::sample(g, [](const double* z) { return cplx(std::exp(-(z[0] * z[0] + z[1] * z[1])), 0.0); });
  CHECK(distance(apply_A_hat(G), G) / norm(G) < 1e-6);
}
