#include <cmath>
#include <numbers>

#include "doctest.h"
#include "htlab/quadrature.hpp"

using namespace htlab;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const Rule& r = gauss_legendre(16);
  double s0 = 0, s30 = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    s0 += r.w[i];
    s30 += r.w[i] * std::pow(r.x[i], 30);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s30 == doctest::Approx(2.0 / 31).epsilon(1e-13));
}

TEST_CASE("composite rule with breakpoints") {
  const double br[3] = {0.0, 1.0, 3.0};
  const Rule r = composite_legendre(std::span<const double>(br, 3), 4);
  double s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::exp(-r.x[i]);
  CHECK(s == doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("generalized Laguerre rule matches Gamma moments") {
  const Rule r = gauss_laguerre(20, 1.5);
  double s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * r.x[i] * r.x[i];
  CHECK(s == doctest::Approx(std::tgamma(4.5)).epsilon(1e-12));
}

TEST_CASE("sphere rules") {
  for (int m = 1; m <= 4; ++m) {
    const SphereRule s = sphere_rule(m, 2);
    double area = 0.0;
    for (double w : s.w) area += w;
    CHECK(area == doctest::Approx(sphere_area(m)).epsilon(1e-12));
    for (std::size_t i = 0; i < s.size(); ++i) {
      double r2 = 0;
      for (int c = 0; c < m; ++c) r2 += s.point(i)[c] * s.point(i)[c];
      CHECK(r2 == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  CHECK(sphere_area(3) == doctest::Approx(4 * std::numbers::pi));
}

TEST_CASE("oscillatory sphere integral matches closed forms") {
  for (double s : {0.0, 0.5, 3.0, 17.0, 40.0}) {
    CHECK(sphere_exp_integral(1, s) == doctest::Approx(2 * std::cos(s)).epsilon(1e-14));
    const double e3 = s == 0 ? 4 * std::numbers::pi : 4 * std::numbers::pi * std::sin(s) / s;
    CHECK(std::abs(sphere_exp_integral(3, s) - e3) < 1e-8);
    CHECK(std::abs(sphere_exp_integral_exact(3, s) - e3) < 1e-12);
    CHECK(std::abs(sphere_exp_integral(2, s) - sphere_exp_integral_exact(2, s)) < 1e-8);
    CHECK(std::abs(sphere_exp_integral(4, s) - sphere_exp_integral_exact(4, s)) < 1e-8);
  }
}
