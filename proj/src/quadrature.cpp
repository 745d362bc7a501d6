#include "htlab/quadrature.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "htlab/errors.hpp"

namespace htlab {

namespace {

Rule fixed_rule(const gsl_integration_fixed_type* type, int n, double a, double b,
                double alpha) {
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(type, static_cast<std::size_t>(n), a, b, alpha, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw DomainError("quadrature rule allocation failed");
  Rule r;
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  r.x.assign(x, x + n);
  r.w.assign(w, w + n);
  return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto rule = std::make_unique<Rule>(fixed_rule(gsl_integration_fixed_legendre, n, -1.0, 1.0, 0.0));
  const Rule& ref = *rule;
  cache.emplace(n, std::move(rule));
  return ref;
}

Rule composite_legendre(double a, double b, int panels, int order) {
  const double breaks[2] = {a, b};
  return composite_legendre(std::span<const double>(breaks, 2), panels, order);
}

Rule composite_legendre(std::span<const double> breaks, int panels, int order) {
  const Rule& g = gauss_legendre(order);
  Rule r;
  if (breaks.size() < 2 || panels < 1) return r;
  r.x.reserve((breaks.size() - 1) * panels * order);
  r.w.reserve(r.x.capacity());
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (!(b > a)) continue;
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * hp;
      const double mid = lo + 0.5 * hp;
      for (int i = 0; i < order; ++i) {
        r.x.push_back(mid + 0.5 * hp * g.x[i]);
        r.w.push_back(0.5 * hp * g.w[i]);
      }
    }
  }
  return r;
}

Rule gauss_laguerre(int n, double alpha) {
  if (n < 1 || alpha <= -1.0) throw DomainError("gauss_laguerre: invalid parameters");
  return fixed_rule(gsl_integration_fixed_laguerre, n, 0.0, 1.0, alpha);
}

Rule gauss_gegenbauer(int n, double alpha) {
  if (n < 1 || alpha <= -1.0) throw DomainError("gauss_gegenbauer: invalid parameters");
  return fixed_rule(gsl_integration_fixed_gegenbauer, n, -1.0, 1.0, alpha);
}

SphereRule sphere_rule(int m, int level) {
  if (m < 1) throw DomainError("sphere_rule: dimension must be positive");
  SphereRule s;
  s.m = m;
  if (m == 1) {
    s.points = {-1.0, 1.0};
    s.w = {1.0, 1.0};
    return s;
  }
  if (m == 2) {
    const int count = 4 << level;
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / count;
      s.points.push_back(std::cos(th));
      s.points.push_back(std::sin(th));
      s.w.push_back(2.0 * std::numbers::pi / count);
    }
    return s;
  }
  const SphereRule lower = sphere_rule(m - 1, level);
  const Rule t = gauss_gegenbauer(4 << level, 0.5 * (m - 3));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double rad = std::sqrt(std::max(0.0, 1.0 - t.x[i] * t.x[i]));
    for (std::size_t j = 0; j < lower.size(); ++j) {
      const double* p = lower.point(j);
      for (int c = 0; c < m - 1; ++c) s.points.push_back(rad * p[c]);
      s.points.push_back(t.x[i]);
      s.w.push_back(t.w[i] * lower.w[j]);
    }
  }
  return s;
}

double sphere_area(int m) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
}

double sphere_exp_integral(int m, double s, double tol) {
  auto eval = [&](int level) {
    const SphereRule r = sphere_rule(m, level);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r.w[i] * std::cos(s * r.point(i)[m - 1]);
    return acc;
  };
  if (m == 1) return eval(0);
  double prev = eval(0);
  for (int level = 1; level <= 12; ++level) {
    const double cur = eval(level);
    if (std::abs(cur - prev) < tol * sphere_area(m)) return cur;
    prev = cur;
  }
  throw AccuracyError("sphere_exp_integral did not converge", std::abs(prev));
}

double sphere_exp_integral_exact(int m, double s) {
  if (m == 1) return 2.0 * std::cos(s);
  const double area = sphere_area(m);
  if (std::abs(s) < 1e-12) return area;
  // int_{S^{m-1}} e^{i s w_m} = (2 pi)^{m/2} s^{1 - m/2} J_{m/2-1}(s)
  const double nu = 0.5 * m - 1.0;
  return std::pow(2.0 * std::numbers::pi, 0.5 * m) * std::pow(std::abs(s), -nu) *
         gsl_sf_bessel_Jnu(nu, std::abs(s));
}

}  // namespace htlab
