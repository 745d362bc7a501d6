#include "htlab/specfun.hpp"

#include <cmath>
#include <numbers>

#include "htlab/errors.hpp"
#include "htlab/quadrature.hpp"

namespace htlab {

int length(const MultiIndex& nu) {
  int s = 0;
  for (int v : nu) {
    if (v < 0) throw DomainError("multi-index entries must be nonnegative");
    s += v;
  }
  return s;
}

double multiplicity(int k, int n) {
  return std::round(std::exp(std::lgamma(k + n) - std::lgamma(k + 1.0) - std::lgamma(n)));
}

void hermite_all(int lmax, double t, double* out) {
  if (lmax < 0 || lmax > kHermiteBudget) throw DomainError("hermite index outside [0, 200]");
  out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * t * t);
  if (lmax == 0) return;
  out[1] = std::sqrt(2.0) * t * out[0];
  for (int l = 1; l < lmax; ++l) {
    out[l + 1] = t * std::sqrt(2.0 / (l + 1)) * out[l] - std::sqrt(double(l) / (l + 1)) * out[l - 1];
  }
}

double hermite_1d(int l, double t) {
  double buf[kHermiteBudget + 1];
  hermite_all(l, t, buf);
  return buf[l];
}

double hermite_tensor(const MultiIndex& nu, double lambda, std::span<const double> xi) {
  if (!(lambda > 0)) throw DomainError("hermite_tensor: lambda must be positive");
  if (xi.size() != nu.size()) throw StructuralError("hermite_tensor: dimension mismatch");
  const double s = std::sqrt(lambda);
  double v = std::pow(lambda, 0.25 * nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) v *= hermite_1d(nu[j], s * xi[j]);
  return v;
}

void laguerre_all(int kmax, double alpha, double x, double* out) {
  out[0] = 1.0;
  if (kmax == 0) return;
  out[1] = 1.0 + alpha - x;
  for (int k = 1; k < kmax; ++k)
    out[k + 1] = ((2.0 * k + 1.0 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1.0);
}

double laguerre_poly(int k, double alpha, double x) {
  if (k < 0) throw DomainError("laguerre_poly: k must be nonnegative");
  std::vector<double> buf(k + 1);
  laguerre_all(k, alpha, x, buf.data());
  return buf[k];
}

double laguerre_fn_radial(int k, double lambda, int n, double r) {
  if (!(lambda > 0)) throw DomainError("laguerre_fn: lambda must be positive");
  const double x = 0.5 * lambda * r * r;
  return std::pow(lambda, n) * laguerre_poly(k, n - 1, x) * std::exp(-0.5 * x);
}

double laguerre_fn(int k, double lambda, std::span<const double> z) {
  if (z.size() % 2 != 0) throw StructuralError("laguerre_fn: z must have even length");
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return laguerre_fn_radial(k, lambda, static_cast<int>(z.size() / 2), std::sqrt(r2));
}

double laguerre_fn_norm_sq(int k, double lambda, int n) {
  return std::pow(2.0 * std::numbers::pi * lambda, n) * multiplicity(k, n);
}

namespace {

constexpr int kOrder = 16;

double window(int m) { return std::max(10.0, 3.0 * std::sqrt(2.0 * m + 1.0)); }

int initial_panels(int m, double amax) {
  const double W = window(m);
  return std::max(4, static_cast<int>(std::ceil(2.0 * W * (amax + 2.0 * std::sqrt(2.0 * m + 1.0) + 2.0) / 12.0)));
}

// Node weights times h_nu(eta + b/2) h_nu'(eta - b/2).
void node_products(int nu, int nup, double b, const Rule& r, std::vector<double>& p) {
  const int lmax = std::max(nu, nup);
  double buf1[kHermiteBudget + 1], buf2[kHermiteBudget + 1];
  p.resize(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    hermite_all(lmax, r.x[q] + 0.5 * b, buf1);
    hermite_all(lmax, r.x[q] - 0.5 * b, buf2);
    p[q] = r.w[q] * buf1[nu] * buf2[nup];
  }
}

std::complex<double> pair_sum(const Rule& r, const std::vector<double>& p, double a) {
  double re = 0.0, im = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double ph = a * r.x[q];
    re += p[q] * std::cos(ph);
    im -= p[q] * std::sin(ph);
  }
  return {re, im};
}

constexpr double kPairTol = 1e-11;
constexpr double kPairFail = 1e-9;
constexpr int kMaxDoublings = 8;

}  // namespace

std::complex<double> pair_integral(int nu, int nup, double a, double b, double* err) {
  if (nu < 0 || nup < 0) throw DomainError("pair_integral: negative index");
  const int m = std::max(nu, nup);
  const double W = window(m);
  int panels = initial_panels(m, std::abs(a));
  std::vector<double> p;
  Rule r = composite_legendre(-W, W, panels, kOrder);
  node_products(nu, nup, b, r, p);
  std::complex<double> prev = pair_sum(r, p, a);
  double diff = 0.0;
  for (int it = 0; it < kMaxDoublings; ++it) {
    panels *= 2;
    r = composite_legendre(-W, W, panels, kOrder);
    node_products(nu, nup, b, r, p);
    const std::complex<double> cur = pair_sum(r, p, a);
    diff = std::abs(cur - prev);
    prev = cur;
    if (diff < kPairTol) break;
  }
  if (err) *err = diff;
  if (diff > kPairFail) throw AccuracyError("pair_integral did not converge", diff);
  return prev;
}

std::complex<double> matrix_coefficient(const MultiIndex& nu, const MultiIndex& nup, double lambda,
                                        std::span<const double> z) {
  if (!(lambda > 0)) throw DomainError("matrix_coefficient: lambda must be positive");
  const std::size_t n = nu.size();
  if (nup.size() != n || z.size() != 2 * n) throw StructuralError("matrix_coefficient: dimension mismatch");
  length(nu);
  length(nup);
  const double s = std::sqrt(lambda);
  const double pref = std::sqrt(lambda / (2.0 * std::numbers::pi));
  std::complex<double> v = 1.0;
  for (std::size_t j = 0; j < n; ++j) v *= pref * pair_integral(nu[j], nup[j], s * z[j], s * z[n + j]);
  return v;
}

Eigen::MatrixXcd pair_coefficient_table(int nu, int nup, double lambda, std::span<const double> a,
                                        std::span<const double> b) {
  if (!(lambda > 0)) throw DomainError("pair_coefficient_table: lambda must be positive");
  if (nu < 0 || nup < 0) throw DomainError("pair_coefficient_table: negative index");
  const double s = std::sqrt(lambda);
  const double pref = std::sqrt(lambda / (2.0 * std::numbers::pi));
  const auto na = static_cast<Eigen::Index>(a.size());
  const auto nb = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXcd out(na, nb);
  if (na == 0 || nb == 0) return out;

  std::vector<double> as(na);
  double amax = 0.0;
  for (Eigen::Index i = 0; i < na; ++i) {
    as[i] = s * a[i];
    amax = std::max(amax, std::abs(as[i]));
  }
  bool uniform = na >= 3;
  const double da = na > 1 ? as[1] - as[0] : 0.0;
  for (Eigen::Index i = 2; i < na && uniform; ++i)
    uniform = std::abs((as[i] - as[i - 1]) - da) < 1e-12 * std::max(1.0, std::abs(da));

  const int m = std::max(nu, nup);
  const double W = window(m);

  auto column = [&](const Rule& r, const std::vector<double>& p, std::vector<std::complex<double>>& col) {
    col.assign(na, 0.0);
    if (!uniform) {
      for (Eigen::Index i = 0; i < na; ++i) col[i] = pair_sum(r, p, as[i]);
      return;
    }
    for (std::size_t q = 0; q < r.size(); ++q) {
      if (std::abs(p[q]) < 1e-20) continue;
      std::complex<double> e = std::polar(p[q], -as[0] * r.x[q]);
      const std::complex<double> step = std::polar(1.0, -da * r.x[q]);
      for (Eigen::Index i = 0; i < na; ++i) {
        col[i] += e;
        e *= step;
      }
    }
  };

  int panels = initial_panels(m, amax);
  std::vector<double> p1, p2;
  std::vector<std::complex<double>> c1, c2;
  for (Eigen::Index j = 0; j < nb; ++j) {
    const double bj = s * b[j];
    // Outside |eta| <= W - |b|/2 one of the two factors is beyond its decay window.
    const double Wj = std::max(1.0, W - 0.5 * std::abs(bj));
    const int pj = std::max(4, static_cast<int>(std::ceil(panels * Wj / W)));
    int used = pj;
    Rule r1 = composite_legendre(-Wj, Wj, used, kOrder);
    node_products(nu, nup, bj, r1, p1);
    column(r1, p1, c1);
    double diff = 0.0;
    for (int it = 0; it <= kMaxDoublings; ++it) {
      Rule r2 = composite_legendre(-Wj, Wj, 2 * used, kOrder);
      node_products(nu, nup, bj, r2, p2);
      column(r2, p2, c2);
      diff = 0.0;
      for (Eigen::Index i = 0; i < na; ++i) diff = std::max(diff, std::abs(c2[i] - c1[i]));
      std::swap(c1, c2);
      if (diff < kPairTol) break;
      used *= 2;
      panels *= 2;
    }
    if (diff > kPairFail) throw AccuracyError("pair_coefficient_table did not converge", diff);
    for (Eigen::Index i = 0; i < na; ++i) out(i, j) = pref * c1[i];
  }
  return out;
}

}  // namespace htlab
