#include <cmath>
#include <random>

#include "doctest.h"
#include "htlab/errors.hpp"
#include "htlab/twisted.hpp"

using namespace htlab;

namespace {

GridFunction gaussian(const Grid& g, double cx, double cy, double w, cplx amp) {
  return GridFunction::sample(g, [=](const double* z) {
    const double r2 = (z[0] - cx) * (z[0] - cx) + (z[1] - cy) * (z[1] - cy);
    return amp * std::exp(-r2 / (2 * w * w));
  });
}

GridFunction random_gaussian(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  return gaussian(g, U(rng), U(rng), 0.7 + 0.3 * (U(rng) + 1), cplx(N(rng), N(rng)));
}

double rel(const GridFunction& a, const GridFunction& b) { return distance(a, b) / norm(b); }

GridFunction restrict_stride(const GridFunction& f, std::size_t stride, const Grid& sub) {
  GridFunction out(sub);
  const std::size_t N = f.grid.axis(0).count, Ns = sub.axis(0).count;
  for (std::size_t i = 0; i < Ns; ++i)
    for (std::size_t j = 0; j < Ns; ++j) out.v[i * Ns + j] = f.v[i * stride * N + j * stride];
  return out;
}

}  // namespace

TEST_CASE("untwisted convolution of Gaussians") {
  const Grid g = Grid::symmetric(2, 10.0, 81);
  const auto f = gaussian(g, 0, 0, 1, 1.0);
  const auto c = twisted_convolution(f, f, 0.0);
  // e^{-|z|^2/2} * e^{-|z|^2/2} = pi e^{-|z|^2/4}
  const auto ref = GridFunction::sample(g, [](const double* z) { return cplx(M_PI * std::exp(-(z[0] * z[0] + z[1] * z[1]) / 4)); });
  double err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(c.v[i] - ref.v[i]));
  CHECK(err < 1e-6);
}

TEST_CASE("twisted convolution is zero on zero and bilinear") {
  const Grid g = Grid::symmetric(2, 6.0, 41);
  const auto f = gaussian(g, 0.3, 0, 1, 1.0);
  const auto h = gaussian(g, 0, -0.4, 0.8, cplx(0, 1));
  const GridFunction zero(g);
  CHECK(norm(twisted_convolution(f, zero, 1.0)) == 0.0);
  const auto lhs = twisted_convolution(f, combine(2.0, h, cplx(0, 3), f), 1.5);
  const auto rhs = combine(2.0, twisted_convolution(f, h, 1.5), cplx(0, 3), twisted_convolution(f, f, 1.5));
  CHECK(rel(lhs, rhs) < 1e-12);
}

TEST_CASE("twisted convolution rejects mismatched grids") {
  GridFunction a(Grid::symmetric(2, 4.0, 17));
  GridFunction b(Grid::symmetric(2, 4.0, 19));
  CHECK_THROWS_AS(twisted_convolution(a, b, 1.0), GridMismatch);
}

TEST_CASE("second-order L0 on phi_0 converges like h^2") {
  auto err = [](std::size_t N) {
    const Grid g = Grid::symmetric(2, 10.0, N);
    const auto f = sample_laguerre(0, 1.0, g);
    return interior_distance(apply_L0(1.0, f, 2), f, 1) / interior_norm(f, 1);
  };
  const double e129 = err(129), e257 = err(257);
  CHECK(e257 <= 1e-3);
  CHECK(e129 / e257 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("eigenvalue relations on matrix coefficients") {
  const Grid g = Grid::symmetric(2, 12.0, 161);
  const double lam = 1.3;
  for (auto [nu, nup] : std::vector<std::pair<int, int>>{{0, 0}, {2, 1}, {0, 4}, {3, 3}}) {
    const auto f = sample_matrix_coefficient({nu}, {nup}, lam, g);
    const auto a = apply_L0(lam, f), h = apply_H(lam, f);
    CHECK(interior_distance(a, scaled((2 * nu + 1) * lam, f), 1) / norm(f) < 1e-4);
    CHECK(interior_distance(h, scaled((nu + nup + 1) * lam, f), 1) / norm(f) < 1e-4);
  }
}

TEST_CASE("H acts on Laguerre functions by [k] lambda") {
  const Grid g = Grid::symmetric(2, 12.0, 161);
  for (int k : {0, 2, 5}) {
    const auto f = sample_laguerre(k, 1.0, g);
    CHECK(interior_distance(apply_H(1.0, f), scaled(bracket(k, 1), f), 1) / norm(f) < 1e-4);
  }
}

TEST_CASE("operators on zero and the coarse-grid flag") {
  const Grid g = Grid::symmetric(2, 12.0, 33);
  const GridFunction zero(g);
  CHECK(norm(apply_L0(1.0, zero)) == 0.0);
  CHECK(norm(apply_H(1.0, zero)) == 0.0);
  CHECK((apply_H(1.0, zero).flags & kFlagCoarseGrid) != 0);
  CHECK((apply_H(1.0, GridFunction(Grid::symmetric(2, 12.0, 513))).flags & kFlagCoarseGrid) == 0);
}

TEST_CASE("project_lambda examples") {
  const Grid g = Grid::symmetric(2, 11.0, 65);
  const double lam = 1.0;
  const auto phi1 = sample_laguerre(1, lam, g);
  CHECK(norm(project_lambda(3, lam, phi1)) / norm(phi1) < 1e-5);
  CHECK(rel(project_lambda(1, lam, phi1), phi1) < 1e-5);
  const auto P = sample_matrix_coefficient({2}, {1}, lam, g);
  CHECK(rel(project_lambda(2, lam, P), P) < 1e-5);
  CHECK(norm(project_lambda(1, lam, P)) / norm(P) < 1e-5);
  CHECK(norm(project_lambda(2, lam, GridFunction(g))) == 0.0);
}

TEST_CASE("project_lambda is idempotent, orthogonal and self-adjoint") {
  const Grid g = Grid::symmetric(2, 11.0, 65);
  std::mt19937_64 rng(7);
  const auto f = random_gaussian(g, rng), h = random_gaussian(g, rng);
  for (int k : {0, 3}) {
    const auto Pf = project_lambda(k, 1.0, f);
    CHECK(distance(project_lambda(k, 1.0, Pf), Pf) / norm(f) < 1e-8);
    CHECK(norm(project_lambda(k + 1, 1.0, Pf)) / norm(f) < 1e-8);
    const cplx a = inner(Pf, h), b = inner(f, project_lambda(k, 1.0, h));
    CHECK(std::abs(a - b) / (norm(f) * norm(h)) < 1e-8);
  }
}

TEST_CASE("eigenvalue consistency of projected random functions") {
  const Grid g = Grid::symmetric(2, 11.0, 65);
  std::mt19937_64 rng(11);
  const auto f = random_gaussian(g, rng);
  for (int k = 0; k <= 4; ++k) {
    const auto Pf = project_lambda(k, 1.0, f);
    if (norm(Pf) <= 1e-6) continue;
    CHECK(rayleigh_quotient(Operator::L0, 1.0, Pf) == doctest::Approx(bracket(k, 1)).epsilon(1e-3));
  }
}

TEST_CASE("kernel and rotation routes agree and do not depend on T") {
  const HTypeGroup H = HTypeGroup::heisenberg(1);
  const Grid out = Grid::symmetric(2, 16.0, 129), quad = Grid::symmetric(2, 18.0, 145), sub = Grid::symmetric(2, 16.0, 17);
  const double cx = 0.4, cy = -0.3, w = 0.9;
  auto gf = [=](const double* z) {
    const double r2 = (z[0] - cx) * (z[0] - cx) + (z[1] - cy) * (z[1] - cy);
    return cplx(1.0, 0.3) * std::exp(-r2 / (2 * w * w));
  };
  const auto g = GridFunction::sample(out, gf);
  for (double m : {0.5, -2.0}) {
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, m);
    Eigen::Matrix2d R;
    R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    const Eigen::MatrixXd T2 = rotation(H, mu) * R;
    CHECK((T2.transpose() * j_map(H, mu / std::abs(m)) * T2 - standard_symplectic(1)).norm() < 1e-14);
    const int k = 3;
    const auto A = restrict_stride(project_pi(k, mu, g, H), 8, sub);
    const auto B = project_pi_rotated(k, mu, gf, H, sub, quad);
    const auto C = project_pi_rotated(k, mu, gf, H, sub, quad, &T2);
    CHECK(distance(A, B) / norm(A) < 1e-8);
    CHECK(distance(B, C) / norm(A) < 1e-8);
  }
}

TEST_CASE("completeness of the kernel-form projections") {
  const HTypeGroup H = HTypeGroup::heisenberg(1);
  const Grid g = Grid::symmetric(2, 12.0, 97);
  const auto f = gaussian(g, 0, 0, 1, 1.0);
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 1.0);
  GridFunction s(g);
  for (int k = 0; k <= 30; ++k) s = combine(1.0, s, 1.0, project_pi(k, mu, f, H));
  CHECK(rel(s, f) < 1e-6);
  CHECK(norm(project_pi(2, mu, GridFunction(g), H)) == 0.0);
}

TEST_CASE("Rayleigh quotients") {
  const Grid g = Grid::symmetric(2, 12.0, 161);
  const auto p00 = sample_matrix_coefficient({0}, {0}, 1.0, g);
  CHECK(rayleigh_quotient(Operator::H, 1.0, p00) == doctest::Approx(1.0).epsilon(1e-3));
  const auto p05 = sample_matrix_coefficient({0}, {5}, 1.0, g);
  CHECK(rayleigh_quotient(Operator::L0, 1.0, p05) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rayleigh_quotient(Operator::L0, 1.0, scaled(2.0, p05)) ==
        doctest::Approx(rayleigh_quotient(Operator::L0, 1.0, p05)).epsilon(1e-14));
  CHECK_THROWS_AS(rayleigh_quotient(Operator::H, 1.0, GridFunction(g)), DomainError);
}
