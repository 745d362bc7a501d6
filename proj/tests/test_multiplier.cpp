#include <cmath>
#include <random>

#include "doctest.h"
#include "htlab/errors.hpp"
#include "htlab/multiplier.hpp"
#include "htlab/quadrature.hpp"

using namespace htlab;
using cplx = std::complex<double>;

TEST_CASE("dyadic bumps form a partition of unity") {
  for (int j = -60; j <= 60; ++j) CHECK(dyadic_bump(j, 0.0) == 0.0);
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double lam = std::pow(10.0, -6.0 + 12.0 * i / 4000.0);
    double s = 0.0;
    for (int j = -30; j <= 30; ++j) s += dyadic_bump(j, lam);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  CHECK(worst < 1e-12);
  double s = 0.0;
  for (int j = -2; j <= 2; ++j) s += dyadic_bump(j, 1.0);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dyadic bumps are exact dilations, even and supported in 1/2..2") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.3, 3.0);
  for (int t = 0; t < 200; ++t) {
    const double lam = U(rng);
    for (int j : {-7, -1, 2, 9}) {
      CHECK(dyadic_bump(j, std::ldexp(lam, j)) == dyadic_chi(lam));
      CHECK(dyadic_bump(j, -lam) == dyadic_bump(j, lam));
    }
  }
  CHECK(dyadic_chi(0.5) == 0.0);
  CHECK(dyadic_chi(2.0) == 0.0);
  CHECK(dyadic_chi(0.49) == 0.0);
  CHECK(dyadic_chi(1.0) > 0.99);
}

TEST_CASE("psi window") {
  CHECK(psi_window(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(psi_window(1.0 / 16) == 0.0);
  CHECK(psi_window(9.0) == 0.0);
  for (double l : {0.25, 0.7, 3.9, 4.0}) CHECK(psi_window(l) == doctest::Approx(1.0).epsilon(1e-14));
  for (double l : {0.13, 0.2, 5.0, 7.9}) CHECK(psi_window(-l) == psi_window(l));
}

TEST_CASE("truncation partition on the brackets") {
  for (int n : {1, 2, 3}) {
    for (int k = 0; k <= 500; ++k) {
      double s = 0.0;
      for (int l = -1; l <= 12; ++l) s += dyadic_bump(l, 2 * k + n);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(dyadic_bump(-2, 2 * k + n) == 0.0);
    }
  }
}

TEST_CASE("low-pass window") {
  CHECK(lowpass(3, 0.0) == 1.0);
  CHECK(lowpass(3, 8.0) == 1.0);
  CHECK(lowpass(3, 16.0) == 0.0);
  CHECK(lowpass(3, 12.0) == doctest::Approx(dyadic_bump(3, 12.0)));
}

TEST_CASE("bochner-riesz multiplier") {
  const auto F = MultiplierSpec::bochner_riesz(1.0, 1.0);
  CHECK(F(0.5).real() == doctest::Approx(0.5));
  CHECK(F(1.0).real() == 0.0);
  CHECK(F(1.5).real() == 0.0);
  const auto G = MultiplierSpec::bochner_riesz(0.5, 0.0);
  CHECK(G(123.0).real() == 1.0);
  CHECK(std::isinf(G.hi()));
  CHECK_THROWS_AS(MultiplierSpec::bochner_riesz(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(MultiplierSpec::bochner_riesz(0.0, 1.0), DomainError);
}

TEST_CASE("bump, table and product respect their supports") {
  const auto B = MultiplierSpec::bump(1.0, 0.5);
  CHECK(B(1.0).real() == doctest::Approx(1.0));
  CHECK(B(0.5).real() == 0.0);
  CHECK(B(-1.0).real() == B(1.0).real());
  CHECK(B(1.49).real() > 0);
  CHECK(std::abs(B(1.5 + 1e-9)) == 0.0);
  const auto T = MultiplierSpec::table({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(T(0.5).real() == doctest::Approx(0.5));
  CHECK(T(2.5).real() == 0.0);
  const auto P = MultiplierSpec::product(B, T);
  CHECK(P(1.2).real() == doctest::Approx(B(1.2).real() * 0.8));
  CHECK(P.lo() == 0.5);
  CHECK(P.hi() == 1.5);
  CHECK(MultiplierSpec::product(B, MultiplierSpec::constant(2.0, 3.0, 4.0)).is_zero());
}

TEST_CASE("bump norms against an adaptive oracle") {
  const auto B = MultiplierSpec::bump(1.0, 0.5);
  // independent oracle: fine trapezoid on the support
  double s = 0.0;
  const int N = 200000;
  for (int i = 1; i < N; ++i) s += std::norm(B(0.5 + i / double(N)));
  CHECK(B.l2_norm() == doctest::Approx(std::sqrt(s / N)).epsilon(1e-8));
  CHECK(B.sup_norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("multiplier JSON round trip") {
  const auto B = MultiplierSpec::from_json({{"kind", "bump"}, {"center", 1.0}, {"halfwidth", 0.25}});
  const auto B2 = MultiplierSpec::from_json(B.description());
  for (double s : {0.8, 0.9, 1.0, 1.1}) CHECK(B(s) == B2(s));
  const auto W = MultiplierSpec::from_json({{"kind", "bochner_riesz"}, {"delta", 2.0}, {"t", 0.125}, {"window", "psi"}});
  CHECK(W.hi() == 8.0);
  CHECK(W(1.0).real() == doctest::Approx(std::pow(0.875, 2)));
  CHECK(W(1.0 / 16).real() == 0.0);
  const auto T = MultiplierSpec::from_json({{"kind", "table"}, {"x", {1.0, 2.0}}, {"re", {1.0, 3.0}}});
  CHECK(T(1.5).real() == doctest::Approx(2.0));
  CHECK_THROWS_AS(MultiplierSpec::from_json({{"kind", "nope"}}), DomainError);
}

TEST_CASE("Fourier localization reconstructs the multiplier") {
  const auto F = MultiplierSpec::bump(1.25, 0.75);
  const FourierGrid g;
  const auto R = fourier_remainder(F, g);
  std::vector<MultiplierSpec> parts;
  for (int i = 0; i <= 9; ++i) parts.push_back(fourier_localize(F, i, g));
  // L2 error on the sampling grid, relative to ||F||
  const Rule r = composite_legendre(-4.0, 4.0, 64, 16);
  double e6 = 0.0, e9 = 0.0, nf = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double s = r.x[q];
    cplx acc = R(s);
    for (int i = 0; i <= 6; ++i) acc += parts[i](s);
    e6 += r.w[q] * std::norm(acc - F(s));
    for (int i = 7; i <= 9; ++i) acc += parts[i](s);
    e9 += r.w[q] * std::norm(acc - F(s));
    nf += r.w[q] * std::norm(F(s));
  }
  CHECK(std::sqrt(e9 / nf) < 1e-8);
  CHECK(std::sqrt(e9) < std::sqrt(e6));
}

TEST_CASE("Fourier pieces are even and bounded by the multiplier norm") {
  const auto F = MultiplierSpec::bump(1.0, 0.5);
  for (int i : {0, 3, 6}) {
    const auto Fi = fourier_localize(F, i);
    for (double s : {0.3, 0.9, 1.7, 5.0}) CHECK(std::abs(Fi(s) - Fi(-s)) < 1e-13);
    const Rule r = composite_legendre(-16.0, 16.0, 256, 16);
    double n2 = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) n2 += r.w[q] * std::norm(Fi(r.x[q]));
    // ||F||_2 over R is sqrt(2) times the half-line norm
    CHECK(std::sqrt(n2) <= std::sqrt(2.0) * F.l2_norm() * (1 + 1e-9));
  }
}

TEST_CASE("Fourier localization preconditions") {
  const auto F = MultiplierSpec::bump(1.0, 0.5);
  CHECK_THROWS_AS(fourier_localize(F, 10), DomainError);
  CHECK_THROWS_AS(fourier_localize(MultiplierSpec::bump(3.0, 0.5), 2), DomainError);
  CHECK_THROWS_AS(fourier_localize(MultiplierSpec::bump(1.0, 0.5, false), 2), DomainError);
  CHECK(fourier_localize(MultiplierSpec(), 2).is_zero());
}

TEST_CASE("joint multipliers") {
  const auto F = MultiplierSpec::bump(1.0, 0.5);
  const auto M = JointMultiplier::of_sqrtL(F);
  CHECK(M(1.0, 0.3) == F(1.0));
  CHECK(M.lambda_lo() == doctest::Approx(0.25));
  CHECK(M.lambda_hi() == doctest::Approx(2.25));
  CHECK(M.euclidean()(1.0) == F(1.0));
  const auto T = JointMultiplier::truncated(F, 2);
  CHECK(T(1.0, 0.0) == 0.0);
  CHECK(!T.euclidean());
  CHECK(T.at_k(1, 1, 1.0 / 3) == F(1.0) * dyadic_bump(2, 3.0));
  CHECK(T.at_k(0, 1, 1.0) == 0.0);
  CHECK(T.bracket_lo() == 2.0);
  CHECK(T.bracket_hi() == 8.0);
  const auto S = JointMultiplier::truncated_sum(F, 4);
  for (int k = 0; k <= 7; ++k) CHECK(std::abs(S.at_k(k, 1, 1.0 / (2 * k + 1)) - F(1.0)) < 1e-14);
  CHECK(S.at_k(16, 1, 1.0 / 33).real() == 0.0);
  CHECK(std::abs(S.at_k(15, 1, 1.0 / 31)) < std::abs(F(1.0)));
  CHECK(JointMultiplier::of_L(MultiplierSpec()).is_zero());
  CHECK_THROWS_AS(JointMultiplier::truncated(F, -2), DomainError);
}
