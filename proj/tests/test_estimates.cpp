#include <cmath>

#include "doctest.h"
#include "htlab/errors.hpp"
#include "htlab/estimates.hpp"
#include "htlab/specfun.hpp"

using namespace htlab;

namespace {

const MultiplierSpec& smooth_bump() {
  static const MultiplierSpec F = MultiplierSpec::bump(1.0, 0.5);
  return F;
}

// Oscillating at a frequency far above 2^ell, so the truncated kernel spreads to |x| ~ 2^ell
// and the weighted norm sees its full extent.
const MultiplierSpec& packet() {
  static const MultiplierSpec F = MultiplierSpec::wave_packet(1.0, 0.5, 1024.0);
  return F;
}

Grid central_grid(int N, double T, int Nu, double P) {
  return Grid({Axis{-T, T, static_cast<std::size_t>(N), false}, Axis{-T, T, static_cast<std::size_t>(N), false},
               Axis{-P / 2, P / 2, static_cast<std::size_t>(Nu), true}},
              2);
}

}  // namespace

TEST_CASE("restriction norms decay like 2^{-ell d2 / 2}") {
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::heisenberg(2), HTypeGroup::quaternionic()}) {
    const ScanReport r = restriction_scan(smooth_bump(), G, 2, 7);
    REQUIRE(r.fitted);
    CHECK(std::abs(r.slope + 0.5 * G.d2()) < 0.3);
    double lo = 1e300, hi = 0.0;
    for (double v : r.metadata["ratios"]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi / lo < 32.0);
  }
}

TEST_CASE("weighted norm at alpha = 0 is the restriction norm") {
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::quaternionic()})
    for (int ell : {2, 5}) {
      const double a = weighted_norm(smooth_bump(), G, 0.0, ell);
      const double b = restriction_norm_p1(smooth_bump(), G, ell);
      CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
}

TEST_CASE("weighted norms agree with the spatial route") {
  const auto G = HTypeGroup::heisenberg(1);
  for (double alpha : {1.0, 2.0}) {
    SpatialOptions so;
    so.alpha = alpha;
    const double spatial = restriction_norm_spatial(smooth_bump(), G, 2, so);
    CHECK(spatial == doctest::Approx(weighted_norm(smooth_bump(), G, alpha, 2)).epsilon(1e-3));
  }
}

TEST_CASE("weighted Plancherel slopes are alpha - d2/2 for oscillating multipliers") {
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::quaternionic()})
    for (double alpha : {0.0, 1.0, 2.0}) {
      const ScanReport r = weighted_plancherel_scan(packet(), G, alpha, 2, 7);
      REQUIRE(r.fitted);
      CHECK(r.metadata["expected_slope"].get<double>() == alpha - 0.5 * G.d2());
      CHECK(std::abs(r.slope - (alpha - 0.5 * G.d2())) < 0.3);
    }
}

TEST_CASE("weighted norms are converged in the band quadrature") {
  const auto G = HTypeGroup::heisenberg(1);
  BandOptions fine;
  fine.panels = 6;
  for (int ell : {2, 6}) {
    const double a = weighted_norm(packet(), G, 2.0, ell);
    const double b = weighted_norm(packet(), G, 2.0, ell, Weight::Power, fine);
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
  }
}

TEST_CASE("max(|x|, 1)-weighted norms are nondecreasing in alpha") {
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::quaternionic()})
    for (int ell : {2, 4}) {
      double prev = 0.0;
      for (double alpha : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
        const double v = weighted_norm(smooth_bump(), G, alpha, ell, Weight::PowerAboveOne);
        CHECK(v >= prev);
        prev = v;
      }
      CHECK(weighted_norm(smooth_bump(), G, 0.0, ell, Weight::PowerAboveOne) ==
            doctest::Approx(restriction_norm_p1(smooth_bump(), G, ell)).epsilon(1e-10));
    }
}

TEST_CASE("scan fits ignore the scale of F and flag the zero multiplier") {
  const auto G = HTypeGroup::quaternionic();
  const ScanReport a = weighted_plancherel_scan(smooth_bump(), G, 1.0, 2, 6);
  const ScanReport b = weighted_plancherel_scan(MultiplierSpec::bump(1.0, 0.5, true, 3.5), G, 1.0, 2, 6);
  CHECK(b.slope == doctest::Approx(a.slope).epsilon(1e-10));
  CHECK(b.intercept - a.intercept == doctest::Approx(std::log2(3.5)).epsilon(1e-10));

  const ScanReport z = weighted_plancherel_scan(MultiplierSpec(), G, 1.0, 2, 6);
  CHECK(z.degenerate);
  CHECK_FALSE(z.fitted);
  for (double v : z.values) CHECK(v == 0.0);
  CHECK(restriction_scan(MultiplierSpec(), G, 2, 6).degenerate);
}

TEST_CASE("estimate preconditions") {
  const auto G = HTypeGroup::heisenberg(1);
  CHECK_THROWS_AS(weighted_norm(smooth_bump(), G, 4.5, 2), DomainError);
  CHECK_THROWS_AS(weighted_norm(smooth_bump(), G, -1.0, 2), DomainError);
  // unbounded support
  CHECK_THROWS_AS(restriction_norm_p1(MultiplierSpec::bochner_riesz(1.0, 0.0), G, 2), DomainError);
  CHECK_THROWS_AS(restriction_norm_spatial(smooth_bump(), HTypeGroup::quaternionic(), 2), DomainError);
  CHECK_THROWS_AS(discrete_restriction_p1(1, 51, 1.0), DomainError);
  CHECK_THROWS_AS(essential_support_scan(smooth_bump(), G, 2, 3, {1.0}), DomainError);
}

TEST_CASE("restriction norm two ways") {
  const auto G = HTypeGroup::heisenberg(1);
  for (int ell : {2, 3}) {
    const double spatial = restriction_norm_spatial(smooth_bump(), G, ell);
    CHECK(spatial == doctest::Approx(restriction_norm_p1(smooth_bump(), G, ell)).epsilon(1e-3));
  }
}

TEST_CASE("discrete restriction at p = 1") {
  const auto d0 = discrete_restriction_p1(1, 0, 1.0);
  CHECK(d0.value == doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-12));
  for (int n : {1, 2}) {
    const double r0 = discrete_restriction_p1(n, 0, 1.0).ratio;
    for (int k = 0; k <= 50; ++k) {
      const auto d = discrete_restriction_p1(n, k, 1.0);
      CHECK(d.quadrature == doctest::Approx(d.value).epsilon(1e-8));
      CHECK(d.ratio / r0 < 4.0);
      CHECK(d.ratio / r0 > 0.25);
      if (n == 1) CHECK(d.ratio == doctest::Approx(r0).epsilon(1e-12));
      const auto d4 = discrete_restriction_p1(n, k, 4.0);
      CHECK(d4.value / d.value == doctest::Approx(std::pow(4.0, 0.5 * n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Gaussian lower bounds stay below the exact norm and the calibrated shape") {
  for (const auto& G : {HTypeGroup::heisenberg(1), HTypeGroup::quaternionic()}) {
    for (int ell : {2, 5}) {
      const LowerBound lb = restriction_lower_bound(smooth_bump(), G, ell, 1.0, 16, 11);
      CHECK(lb.value > 0.0);
      CHECK(lb.value <= restriction_norm_p1(smooth_bump(), G, ell) * (1 + 1e-9));
      CHECK(lb.ratio <= kLowerBoundC);
    }
  }
  const auto Q = HTypeGroup::quaternionic();
  const LowerBound lq = restriction_lower_bound(smooth_bump(), Q, 4, 4.0 / 3.0, 16, 11);
  CHECK(lq.ratio <= kLowerBoundC);
  CHECK_FALSE(lq.outside_range);
  CHECK_THROWS_AS(restriction_lower_bound(smooth_bump(), Q, 4, 1.5, 4, 1), DomainError);
  CHECK_THROWS_AS(restriction_lower_bound(smooth_bump(), HTypeGroup::heisenberg(1), 4, 1.2, 4, 1), DomainError);
  const LowerBound forced = restriction_lower_bound(smooth_bump(), Q, 4, 1.5, 4, 1, true);
  CHECK(forced.outside_range);
}

TEST_CASE("Gaussian responses are linear in F and decay with the central truncation") {
  const auto G = HTypeGroup::quaternionic();
  const double a = gaussian_response_norm(smooth_bump(), G, 3, 0.7, 2.0);
  const double b = gaussian_response_norm(MultiplierSpec::bump(1.0, 0.5, true, -2.5), G, 3, 0.7, 2.0);
  CHECK(b == doctest::Approx(2.5 * a).epsilon(1e-12));
  CHECK(gaussian_response_norm(MultiplierSpec(), G, 3, 0.7, 2.0) == 0.0);
  // ||f||_1 of exp(-|x|^2/2s^2 - |u|^2/2t^2) on R^4 x R^3
  CHECK(gaussian_lp_norm(G, 0.7, 2.0, 1.0) ==
        doctest::Approx(std::pow(2 * M_PI * 0.49, 2) * std::pow(2 * M_PI * 4.0, 1.5)).epsilon(1e-12));
  const LowerBound lo = restriction_lower_bound(smooth_bump(), G, 3, 1.0, 8, 5);
  const LowerBound again = restriction_lower_bound(smooth_bump(), G, 3, 1.0, 8, 5);
  CHECK(lo.value == again.value);
  CHECK(lo.sigma == again.sigma);
}

TEST_CASE("essential support of the truncated Fourier pieces") {
  const auto G = HTypeGroup::heisenberg(1);
  const ScanReport r = essential_support_scan(smooth_bump(), G, 5, 3, {1e-4, 0.25, 0.5, 1, 2, 3, 4, 6, 8});
  REQUIRE(r.values.size() == 9);
  CHECK(r.values.front() > 1 - 1e-6);
  for (std::size_t i = 1; i < r.values.size(); ++i) CHECK(r.values[i] <= r.values[i - 1]);
  CHECK(r.values[6] < kSupportTheta);
  for (double v : r.values) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("finite propagation soft check") {
  const auto G = HTypeGroup::heisenberg(1);
  SUBCASE("t = 0 without cutoff reproduces f") {
    const Grid g = central_grid(41, 6.0, 64, 16.0);
    const GridFunction f = GridFunction::sample(g, [](const double* z) {
      return std::complex<double>(std::exp(-0.5 * (z[0] * z[0] + z[1] * z[1]) - 0.5 * z[2] * z[2]), 0.0);
    });
    PropagationOptions o;
    o.cutoff = -1;
    o.lambda_max = 128.0;
    const PropagationReport r = propagation_check(G, f, 0.0, o);
    CHECK(r.relative_change < 1e-6);
    CHECK(r.leakage < 1e-10);
  }
  SUBCASE("reference configuration") {
    const Grid g = central_grid(65, 8.0, 256, 32.0);
    const GridFunction f = quasi_ball_bump(g, G, 1.0);
    const PropagationReport r = propagation_check(G, f, 1.0);
    REQUIRE(r.outside.size() == 4);
    for (std::size_t i = 1; i < r.outside.size(); ++i) CHECK(r.outside[i] <= r.outside[i - 1]);
    CHECK(r.outside[2] < kPropagationTheta);
    CHECK(r.outside[2] < r.leakage);
    CHECK(r.wrap_fraction < 1e-4);
  }
}
