#include <gsl/gsl_sf_hermite.h>
#include <gsl/gsl_sf_laguerre.h>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "htlab/errors.hpp"
#include "htlab/quadrature.hpp"
#include "htlab/specfun.hpp"

using namespace htlab;
using cplx = std::complex<double>;

TEST_CASE("hermite_1d basic values") {
  CHECK(hermite_1d(0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
  CHECK(std::abs(hermite_1d(1, 0.0)) < 1e-300);
  CHECK_THROWS_AS(hermite_1d(201, 0.0), DomainError);
  CHECK_THROWS_AS(hermite_1d(-1, 0.0), DomainError);
}

TEST_CASE("hermite_1d agrees with an independent library evaluation") {
  for (int l : {0, 1, 2, 7, 20, 45}) {
    for (double t : {-6.0, -1.3, 0.0, 0.4, 2.5, 8.0}) {
      CHECK(std::abs(hermite_1d(l, t) - gsl_sf_hermite_func(l, t)) < 1e-12);
    }
  }
}

TEST_CASE("hermite_1d at l = 100 matches extended-precision fixture") {
  // Reference values of the normalized Hermite function h_100, computed with 60-digit arithmetic.
  const double ref[3][2] = {{0.0, 0.2119042677634310888262765},
                            {1.0, -0.006067980238671775254398579},
                            {5.0, 0.2108546196839316417900706}};
  for (const auto& r : ref) CHECK(std::abs(hermite_1d(100, r[0]) / r[1] - 1.0) < 1e-9);
}

TEST_CASE("Hermite functions are orthonormal") {
  const Rule r = composite_legendre(-16.0, 16.0, 64);
  std::vector<double> buf(21);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(21, 21);
  for (std::size_t q = 0; q < r.size(); ++q) {
    hermite_all(20, r.x[q], buf.data());
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; b <= 20; ++b) G(a, b) += r.w[q] * buf[a] * buf[b];
  }
  CHECK((G - Eigen::MatrixXd::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hermite_tensor") {
  const double xi0[2] = {0.0, 0.0};
  CHECK(hermite_tensor({0, 0}, 1.0, xi0) == doctest::Approx(std::pow(std::numbers::pi, -0.5)).epsilon(1e-15));
  const double xi[2] = {0.3, -1.1};
  const double lam = 2.7;
  const double sxi[2] = {std::sqrt(lam) * xi[0], std::sqrt(lam) * xi[1]};
  CHECK(hermite_tensor({2, 3}, lam, xi) ==
        doctest::Approx(std::pow(lam, 0.5) * hermite_tensor({2, 3}, 1.0, sxi)).epsilon(1e-14));
  // norm 1 in R^1 at lambda = 3
  const Rule r = composite_legendre(-12.0, 12.0, 48);
  double s = 0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double v = hermite_tensor({4}, 3.0, std::span<const double>(&r.x[q], 1));
    s += r.w[q] * v * v;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("laguerre_poly") {
  CHECK(laguerre_poly(0, 3, 1.7) == 1.0);
  CHECK(laguerre_poly(1, 0, 2.0) == doctest::Approx(-1.0));
  CHECK(laguerre_poly(3, 1, 0.0) == doctest::Approx(4.0));
  for (int k : {0, 1, 5, 17, 40})
    for (double a : {0.0, 1.0, 2.5})
      for (double x : {0.0, 0.3, 4.0, 25.0})
        CHECK(laguerre_poly(k, a, x) == doctest::Approx(gsl_sf_laguerre_n(k, a, x)).epsilon(1e-10));
}

TEST_CASE("laguerre_fn value, scaling and radiality") {
  const double z0[2] = {0, 0};
  CHECK(laguerre_fn(0, 1.0, z0) == 1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0, 1);
  for (int t = 0; t < 20; ++t) {
    double z[4], zr[4], zs[4];
    for (double& v : z) v = N(rng);
    const double lam = 0.3 + std::abs(N(rng));
    for (int i = 0; i < 4; ++i) zs[i] = std::sqrt(lam) * z[i];
    CHECK(laguerre_fn(3, lam, z) == doctest::Approx(lam * lam * laguerre_fn(3, 1.0, zs)).epsilon(1e-12));
    // rotation in the (z0, z2) plane and in the (z1, z3) plane
    const double th = N(rng);
    zr[0] = std::cos(th) * z[0] - std::sin(th) * z[2];
    zr[2] = std::sin(th) * z[0] + std::cos(th) * z[2];
    zr[1] = std::cos(th) * z[1] + std::sin(th) * z[3];
    zr[3] = -std::sin(th) * z[1] + std::cos(th) * z[3];
    CHECK(laguerre_fn(4, lam, zr) == doctest::Approx(laguerre_fn(4, lam, z)).epsilon(1e-12));
  }
}

TEST_CASE("laguerre_fn norms by radial quadrature") {
  for (int n : {1, 2})
    for (double lam : {0.5, 1.0, 2.0})
      for (int k : {0, 3, 10}) {
        const double R = 2.0 * std::sqrt((4.0 * k + 2.0 * n + 60.0) / lam);
        const Rule r = composite_legendre(0.0, R, 200);
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) {
          const double v = laguerre_fn_radial(k, lam, n, r.x[q]);
          s += r.w[q] * v * v * std::pow(r.x[q], 2 * n - 1);
        }
        s *= sphere_area(2 * n);
        CHECK(s / laguerre_fn_norm_sq(k, lam, n) == doctest::Approx(1.0).epsilon(1e-10));
      }
  CHECK(laguerre_fn_norm_sq(0, 1.0, 1) == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("matrix coefficient closed forms and scaling") {
  const double z0[2] = {0, 0};
  CHECK(std::abs(matrix_coefficient({0}, {0}, 1.0, z0) - 1.0 / std::sqrt(2 * std::numbers::pi)) < 1e-12);
  // Phi_{0,0}^1 = (2 pi)^{-1/2} exp(-|z|^2/4)
  const double z[2] = {1.3, -0.7};
  CHECK(std::abs(matrix_coefficient({0}, {0}, 1.0, z) -
                 std::exp(-0.25 * (1.3 * 1.3 + 0.7 * 0.7)) / std::sqrt(2 * std::numbers::pi)) < 1e-12);
  const double lam = 1.7;
  const double w[4] = {0.4, -1.0, 0.2, 0.9};
  double ws[4];
  for (int i = 0; i < 4; ++i) ws[i] = std::sqrt(lam) * w[i];
  const cplx a = matrix_coefficient({1, 2}, {3, 0}, lam, w);
  const cplx b = lam * matrix_coefficient({1, 2}, {3, 0}, 1.0, ws);
  CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
}

TEST_CASE("Laguerre link: sum over |nu| = k of Phi_{nu,nu} gives phi_k") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0, 1.2);
  for (int n : {1, 2}) {
    for (int k = 0; k <= 5; ++k) {
      for (int t = 0; t < 3; ++t) {
        std::vector<double> z(2 * n);
        for (double& v : z) v = N(rng);
        const double lam = t == 0 ? 1.0 : (t == 1 ? 0.5 : 2.0);
        cplx s = 0.0;
        if (n == 1) {
          s = matrix_coefficient({k}, {k}, lam, z);
        } else {
          for (int a = 0; a <= k; ++a) s += matrix_coefficient({a, k - a}, {a, k - a}, lam, z);
        }
        s *= std::pow(2 * std::numbers::pi * lam, 0.5 * n);
        CHECK(std::abs(s - laguerre_fn(k, lam, z)) < 1e-8);
      }
    }
  }
}

TEST_CASE("pair_coefficient_table matches pointwise evaluation") {
  std::vector<double> a, b;
  for (int i = 0; i < 21; ++i) a.push_back(-6.0 + 0.6 * i);
  for (int i = 0; i < 7; ++i) b.push_back(-5.0 + 1.7 * i);
  const Eigen::MatrixXcd T = pair_coefficient_table(3, 1, 1.4, a, b);
  for (std::size_t i = 0; i < a.size(); i += 4)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double z[2] = {a[i], b[j]};
      CHECK(std::abs(T(i, j) - matrix_coefficient({3}, {1}, 1.4, z)) < 1e-11);
    }
}
