#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace htlab {

/// Nodes and weights of a one-dimensional rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// Gauss-Legendre rule with n nodes on [-1, 1]. Cached; safe to call concurrently.
const Rule& gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with equal panels.
Rule composite_legendre(double a, double b, int panels, int order = 16);

/// Composite Gauss-Legendre over consecutive breakpoints, `panels` per segment.
Rule composite_legendre(std::span<const double> breaks, int panels, int order = 16);

/// Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf).
Rule gauss_laguerre(int n, double alpha);

/// Gauss-Gegenbauer rule for the weight (1 - t^2)^alpha on [-1, 1].
Rule gauss_gegenbauer(int n, double alpha);

/// Product rule on the unit sphere S^{m-1} in R^m. Points are stored row-wise
/// (m coordinates each). Weights sum to the sphere area.
struct SphereRule {
  int m = 0;
  std::vector<double> points;
  std::vector<double> w;
  std::size_t size() const { return w.size(); }
  const double* point(std::size_t i) const { return points.data() + i * m; }
};

/// m = 1: the two points {-1, +1}; m = 2: uniform circle with 4*2^level points;
/// m >= 3: Gegenbauer nodes in the last coordinate times the rule on S^{m-2}.
SphereRule sphere_rule(int m, int level);

/// Area of S^{m-1}.
double sphere_area(int m);

/// Spherical average integral  int_{S^{m-1}} exp(i s w_m) dsigma(w), by the
/// product rule with level doubling until successive values differ < tol.
double sphere_exp_integral(int m, double s, double tol = 1e-8);

/// Closed form of the same integral (2 cos s, 2 pi J0(s), 4 pi sin(s)/s, ...).
double sphere_exp_integral_exact(int m, double s);

}  // namespace htlab
