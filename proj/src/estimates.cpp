#include "htlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "htlab/errors.hpp"
#include "htlab/kernel.hpp"
#include "htlab/parallel.hpp"
#include "htlab/quadrature.hpp"
#include "htlab/specfun.hpp"
#include "htlab/twisted.hpp"

namespace htlab {

namespace {

constexpr double kPi = std::numbers::pi;

// c^2 (2 pi)^{-d2} |S^{d2-1}|: the factor in front of int drho rho^{d2-1} ||K^mu||^2.
double central_factor(int n, int d2) {
  const double c = projector_constant(n);
  return c * c * std::pow(2 * kPi, -d2) * sphere_area(d2);
}

// e^{-t/2} L_k^{(n-1)}(t) for k = 0..kmax (scaled to keep large nodes finite).
void scaled_laguerre(int kmax, int n, double t, std::vector<double>& out) {
  out.resize(kmax + 1);
  laguerre_all(kmax, n - 1, t, out.data());
  const double s = std::exp(-0.5 * t);
  for (double& v : out) v *= s;
}

// int_0^inf t^{beta} |sum_k a_k L_k(t)|^2 e^{-t} dt by Gauss-Laguerre (exact for integer beta).
struct LaguerreForm {
  Rule rule;
  std::vector<std::vector<double>> L;  // scaled L_k at the nodes
  std::vector<double> w;               // w_i e^{t_i}

  LaguerreForm(int kmax, int n, double beta, int extra) {
    rule = gauss_laguerre(kmax + 1 + extra, beta);
    L.resize(rule.size());
    w.resize(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      scaled_laguerre(kmax, n, rule.x[i], L[i]);
      w[i] = rule.w[i] * std::exp(rule.x[i]);
    }
  }
  double operator()(const std::vector<std::complex<double>>& a, int kmin) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      std::complex<double> v = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) v += a[j] * L[i][kmin + j];
      s += w[i] * std::norm(v);
    }
    return s;
  }
};

// int_0^{t0} t^{beta} |sum a_k L_k|^2 e^{-t} dt by Gauss-Legendre.
double head_integral(const std::vector<std::complex<double>>& a, int kmin, int n, double beta, double t0) {
  if (t0 <= 0) return 0.0;
  const int kmax = kmin + static_cast<int>(a.size()) - 1;
  const Rule r = composite_legendre(0.0, t0, 2 + kmax / 8, 16);
  std::vector<double> L;
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    scaled_laguerre(kmax, n, r.x[i], L);
    std::complex<double> v = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) v += a[j] * L[kmin + j];
    s += r.w[i] * std::pow(r.x[i], beta) * std::norm(v);
  }
  return s;
}

std::vector<std::complex<double>> band_coefficients(const JointMultiplier& M, const BandRule& b, int n, double rho) {
  std::vector<std::complex<double>> a(b.kmax - b.kmin + 1);
  for (int k = b.kmin; k <= b.kmax; ++k) a[k - b.kmin] = M.at_k(k, n, rho);
  return a;
}

// log-uniform sample in [2^lo, 2^hi] from a raw 64-bit draw
double log_uniform(std::uint64_t bits, double lo, double hi) {
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return std::exp2(lo + (hi - lo) * u);
}

}  // namespace

BandRule band_rule(const JointMultiplier& M, int n, const BandOptions& opt) {
  if (!std::isfinite(M.bracket_hi())) throw DomainError("band_rule: multiplier is not truncated");
  if (!std::isfinite(M.lambda_hi())) throw DomainError("band_rule: unbounded spectral support");
  BandRule b;
  std::vector<double> breaks;
  const double lo = M.lambda_lo(), hi = M.lambda_hi();
  for (int k = 0; bracket(k, n) <= M.bracket_hi(); ++k) {
    const double br = bracket(k, n);
    if (br < M.bracket_lo() || M.truncation_at(br) == 0.0) continue;
    if (b.kmax < 0) b.kmin = k;
    b.kmax = k;
    breaks.push_back(lo / br);
    breaks.push_back(hi / br);
  }
  if (b.kmax < 0 || M.is_zero() || !(hi > lo)) throw DomainError("band_rule: empty band");
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double br_max = bracket(b.kmax, n);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], c = breaks[i + 1];
    const double cycles = opt.frequency * (std::sqrt(br_max * c) - std::sqrt(br_max * a));
    const int panels = std::max(1, opt.panels) + static_cast<int>(std::ceil(2.0 * cycles));
    const Rule r = composite_legendre(a, c, panels, 16);
    b.rho.insert(b.rho.end(), r.x.begin(), r.x.end());
    b.w.insert(b.w.end(), r.w.begin(), r.w.end());
  }
  return b;
}

namespace {

BandOptions with_hint(const MultiplierSpec& F, BandOptions opt) {
  opt.frequency = std::max(opt.frequency, F.oscillation() / (2 * kPi));
  return opt;
}

}  // namespace

double weighted_norm(const MultiplierSpec& F, const HTypeGroup& G, double alpha, int ell, Weight weight,
                     const BandOptions& opt) {
  if (!(alpha >= 0.0 && alpha <= 4.0)) throw DomainError("weighted_norm: alpha must lie in [0, 4]");
  if (F.is_zero()) return 0.0;
  const int n = G.n(), d2 = G.d2();
  const JointMultiplier M = JointMultiplier::truncated(F, ell);
  const BandRule b = band_rule(M, n, with_hint(F, opt));
  const LaguerreForm full(b.kmax, n, alpha + n - 1, 4 + static_cast<int>(std::ceil(alpha)));
  std::vector<double> parts(b.rho.size());
#pragma omp parallel for schedule(dynamic)
  for (long long q = 0; q < static_cast<long long>(b.rho.size()); ++q) {
    const double rho = b.rho[q];
    const auto a = band_coefficients(M, b, n, rho);
    double v = std::pow(2.0, alpha + n - 1) * std::pow(rho, n - alpha) * full(a, b.kmin);
    if (weight == Weight::PowerAboveOne && alpha > 0) {
      // |x| < 1 is t < rho/2: swap the |x|^{2 alpha} weight for 1 there
      const double t0 = 0.5 * rho;
      v -= std::pow(2.0, alpha + n - 1) * std::pow(rho, n - alpha) * head_integral(a, b.kmin, n, alpha + n - 1, t0);
      v += std::pow(2.0, n - 1) * std::pow(rho, n) * head_integral(a, b.kmin, n, n - 1, t0);
    }
    parts[q] = b.w[q] * std::pow(rho, d2 - 1) * v;
  }
  const double s = central_factor(n, d2) * sphere_area(2 * n) * pairwise_sum(std::span<const double>(parts));
  return std::sqrt(std::max(s, 0.0));
}

ScanReport weighted_plancherel_scan(const MultiplierSpec& F, const HTypeGroup& G, double alpha, int ell_lo,
                                    int ell_hi, Weight weight, const BandOptions& opt) {
  ScanReport r;
  r.variable = "ell";
  r.quantity = "weighted_kernel_norm";
  for (int ell = ell_lo; ell <= ell_hi; ++ell) r.add(ell, weighted_norm(F, G, alpha, ell, weight, opt));
  r.fit();
  r.metadata = {{"group", G.name()},
                {"multiplier", F.label()},
                {"alpha", alpha},
                {"weight", weight == Weight::Power ? "power" : "power_above_one"},
                {"expected_slope", alpha - 0.5 * G.d2()}};
  return r;
}

double restriction_norm_p1(const MultiplierSpec& F, const HTypeGroup& G, int ell) {
  if (F.is_zero()) return 0.0;
  if (!std::isfinite(F.hi())) throw DomainError("restriction_norm_p1: unbounded multiplier support");
  const int n = G.n(), d2 = G.d2();
  // int lam^{d2+n-1} |F(sqrt lam)|^2 dlam = 2 int s^{2(d2+n)-1} |F(s)|^2 ds
  const Rule r = composite_legendre(std::max(F.lo(), 0.0), F.hi(), 64, 16);
  double A = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) A += 2 * r.w[q] * std::pow(r.x[q], 2 * (d2 + n) - 1) * std::norm(F(r.x[q]));
  double S = 0.0;
  for (int k = 0; bracket(k, n) < std::ldexp(1.0, ell + 1); ++k) {
    const double chi = dyadic_bump(ell, bracket(k, n));
    S += chi * chi * multiplicity(k, n) * std::pow(bracket(k, n), -(d2 + n));
  }
  const double c = projector_constant(n);
  return std::sqrt(c * c * std::pow(2 * kPi, n - d2) * sphere_area(d2) * S * A);
}

ScanReport restriction_scan(const MultiplierSpec& F, const HTypeGroup& G, int ell_lo, int ell_hi) {
  ScanReport r;
  r.variable = "ell";
  r.quantity = "kernel_l2_norm";
  std::vector<double> ratios;
  const double fn = F.l2_norm();
  for (int ell = ell_lo; ell <= ell_hi; ++ell) {
    const double v = restriction_norm_p1(F, G, ell);
    r.add(ell, v);
    ratios.push_back(fn > 0 ? v / (std::exp2(-0.5 * ell * G.d2()) * fn) : 0.0);
  }
  r.fit();
  r.metadata = {{"group", G.name()},
                {"multiplier", F.label()},
                {"p", 1.0},
                {"expected_slope", -0.5 * G.d2()},
                {"ratios", ratios}};
  return r;
}

double restriction_norm_spatial(const MultiplierSpec& F, const HTypeGroup& G, int ell, const SpatialOptions& opt) {
  if (G.d2() != 1) throw DomainError("restriction_norm_spatial: only for one-dimensional centers");
  const int n = G.n();
  const JointMultiplier M = JointMultiplier::truncated(F, ell);
  const BandRule b = band_rule(M, n, with_hint(F, {}));
  const double rho_min = M.lambda_lo() / bracket(b.kmax, n);
  const double rho_max = M.lambda_hi() / bracket(b.kmin, n);
  const double width = (M.lambda_hi() - M.lambda_lo()) / bracket(b.kmax, n);
  const double R = opt.r_max > 0 ? opt.r_max : std::sqrt(2 * (2 * bracket(b.kmax, n) + 40 + 20 * opt.alpha) / rho_min);
  const double U = opt.u_max > 0 ? opt.u_max : 60.0 / width;
  KernelOptions ko;
  ko.mu_min = 0.0;
  ko.x_max = R;
  ko.u_max = 2 * U;
  ko.refine = opt.refine;
  const KernelTable K = synthesize_kernel(M, G, nullptr, ko);

  const int refine = std::max(1, opt.refine);
  const Rule rr = composite_legendre(0.0, R, refine * (8 + static_cast<int>(std::ceil(2 * R * std::sqrt(rho_max)))), 16);
  const Rule ru = composite_legendre(0.0, U, refine * (8 + static_cast<int>(std::ceil(U * rho_max / kPi))), 16);
  const std::size_t J = K.term_count();
  // K(r, u) = prefactor sum_j W_j coef_j phi_j(r) 2 cos(rho_j u) as A (Br + i Bi)
  Eigen::MatrixXd A(rr.size(), J), Br(J, ru.size()), Bi(J, ru.size());
  std::size_t j = 0;
  for (const auto& t : K.record)
    for (std::size_t q = 0; q < t.rho.size(); ++q, ++j)
      for (std::size_t i = 0; i < rr.size(); ++i) A(i, j) = laguerre_fn_radial(t.k, t.rho[q], n, rr.x[i]);
  j = 0;
  for (const auto& t : K.record)
    for (std::size_t q = 0; q < t.rho.size(); ++q, ++j)
      for (std::size_t m = 0; m < ru.size(); ++m) {
        const double c = K.prefactor * t.w[q] * 2 * std::cos(t.rho[q] * ru.x[m]);
        Br(j, m) = c * t.coef[q].real();
        Bi(j, m) = c * t.coef[q].imag();
      }
  const Eigen::MatrixXd Kr = A * Br, Ki = A * Bi;
  std::vector<double> parts(rr.size());
  for (std::size_t i = 0; i < rr.size(); ++i) {
    double s = 0.0;
    for (std::size_t m = 0; m < ru.size(); ++m) s += ru.w[m] * (Kr(i, m) * Kr(i, m) + Ki(i, m) * Ki(i, m));
    parts[i] = rr.w[i] * std::pow(rr.x[i], 2 * n - 1 + 2 * opt.alpha) * s;
  }
  // u-integral over [-U, U] is twice the half-line integral (K is even in u)
  return std::sqrt(2 * sphere_area(2 * n) * pairwise_sum(std::span<const double>(parts)));
}

DiscreteRestriction discrete_restriction_p1(int n, int k, double rho) {
  if (n < 1) throw DomainError("discrete_restriction_p1: n must be positive");
  if (k < 0 || k > 50) throw DomainError("discrete_restriction_p1: k must lie in 0..50");
  if (!(rho > 0)) throw DomainError("discrete_restriction_p1: |mu| must be positive");
  DiscreteRestriction d;
  d.n = n;
  d.k = k;
  d.rho = rho;
  d.value = std::sqrt(std::pow(2 * kPi * rho, n) * multiplicity(k, n));
  const double R = std::sqrt(2 * (2.0 * bracket(k, n) + 80) / rho);
  const Rule r = composite_legendre(0.0, R, 16 + 2 * k, 16);
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double phi = laguerre_fn_radial(k, rho, n, r.x[q]);
    s += r.w[q] * std::pow(r.x[q], 2 * n - 1) * phi * phi;
  }
  d.quadrature = std::sqrt(sphere_area(2 * n) * s);
  d.shape = std::pow(rho, 0.5 * n) * std::pow(bracket(k, n), 0.5 * (n - 1));
  d.ratio = d.value / d.shape;
  return d;
}

double gaussian_lp_norm(const HTypeGroup& G, double sigma, double tau, double p) {
  const int n = G.n(), d2 = G.d2();
  return std::pow(std::pow(2 * kPi * sigma * sigma / p, n) * std::pow(2 * kPi * tau * tau / p, 0.5 * d2), 1.0 / p);
}

double gaussian_response_norm(const MultiplierSpec& F, const HTypeGroup& G, int ell, double sigma, double tau) {
  if (F.is_zero()) return 0.0;
  const int n = G.n(), d2 = G.d2();
  const JointMultiplier M = JointMultiplier::truncated(F, ell);
  const BandRule b = band_rule(M, n, with_hint(F, {}));
  const double log_sphere = std::log(sphere_area(2 * n)) + (n - 1) * std::log(2.0);
  std::vector<double> parts(b.rho.size());
  for (std::size_t q = 0; q < b.rho.size(); ++q) {
    const double rho = b.rho[q];
    // <g, phi_k> = |S^{2n-1}| 2^{n-1} Gamma(k+n) (s-1)^k / (k! s^{k+n}), s = 1/2 + 1/(rho sigma^2)
    const double s = 0.5 + 1.0 / (rho * sigma * sigma);
    double acc = 0.0;
    for (int k = b.kmin; k <= b.kmax; ++k) {
      const double m2 = std::norm(M.at_k(k, n, rho));
      if (m2 == 0.0) continue;
      const double lg = log_sphere + std::lgamma(k + n) - std::lgamma(k + 1.0) +
                        (k > 0 ? k * std::log(std::abs(s - 1)) : 0.0) - (k + n) * std::log(s);
      acc += m2 * std::exp(2 * lg) / laguerre_fn_norm_sq(k, rho, n);
    }
    const double central = std::pow(2 * kPi * tau * tau, d2) * std::exp(-tau * tau * rho * rho);
    parts[q] = b.w[q] * std::pow(rho, d2 - 1) * central * acc;
  }
  const double s = std::pow(2 * kPi, -d2) * sphere_area(d2) * pairwise_sum(std::span<const double>(parts));
  return std::sqrt(s);
}

LowerBound restriction_lower_bound(const MultiplierSpec& F, const HTypeGroup& G, int ell, double p, int trials,
                                   std::uint64_t seed, bool force) {
  const int d2 = G.d2();
  const double p_max = 2.0 * (d2 + 1) / (d2 + 3);
  LowerBound lb;
  lb.outside_range = p < 1.0 || p > p_max + 1e-12;
  if (lb.outside_range && !force) throw DomainError("restriction_lower_bound: p outside [1, 2(d2+1)/(d2+3)]");
  if (p < 1.0) throw DomainError("restriction_lower_bound: p must be at least 1");
  if (trials < 1) throw DomainError("restriction_lower_bound: need at least one trial");
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const double sigma = log_uniform(rng(), -4.0, 0.5 * ell + 4.0);
    const double tau = log_uniform(rng(), -4.0, ell + 4.0);
    const double v = gaussian_response_norm(F, G, ell, sigma, tau) / gaussian_lp_norm(G, sigma, tau, p);
    if (v > lb.value) {
      lb.value = v;
      lb.sigma = sigma;
      lb.tau = tau;
    }
  }
  lb.shape = std::exp2(-ell * d2 * (1.0 / p - 0.5)) * F.l2_norm();
  lb.ratio = lb.shape > 0 ? lb.value / lb.shape : 0.0;
  return lb;
}

ScanReport essential_support_scan(const MultiplierSpec& F, const HTypeGroup& G, int iota, int ell,
                                  const std::vector<double>& c_values, const FourierGrid& grid) {
  if (ell > iota) throw DomainError("essential_support_scan: requires ell <= iota");
  const int n = G.n(), d2 = G.d2();
  const MultiplierSpec base = MultiplierSpec::windowed(fourier_localize(F, iota, grid));
  ScanReport r;
  r.variable = "c";
  r.quantity = "outside_mass_fraction";
  r.metadata = {{"group", G.name()}, {"multiplier", F.label()}, {"iota", iota}, {"ell", ell}};
  if (base.is_zero()) {
    for (double c : c_values) r.add(c, 0.0);
    r.degenerate = true;
    return r;
  }
  const JointMultiplier M = JointMultiplier::truncated(base, ell);
  BandOptions bo;
  bo.frequency = std::ldexp(1.0, iota + 1) / (2 * kPi);
  const BandRule b = band_rule(M, n, bo);
  // tail(X) = int_X^inf t^{n-1} |P(t)|^2 e^{-t} dt = e^{-X} int_0^inf (X+s)^{n-1} |P(X+s)|^2 e^{-s} ds
  const Rule gl = gauss_laguerre(b.kmax + n + 2, 0.0);
  auto tail = [&](const std::vector<std::complex<double>>& a, double X) {
    if (X > 1400) return 0.0;
    std::vector<double> L(b.kmax + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double t = X + gl.x[i];
      laguerre_all(b.kmax, n - 1, t, L.data());
      std::complex<double> v = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) v += a[j] * L[b.kmin + j];
      // e^{-X} folded into the node weight in log form to avoid overflow of |P|^2
      const double lw = std::log(gl.w[i]) - X + (n - 1) * std::log(t);
      const double av = std::abs(v);
      if (av > 0) s += std::exp(lw + 2 * std::log(av));
    }
    return s;
  };
  std::vector<double> total(b.rho.size());
  std::vector<std::vector<double>> outside(c_values.size(), std::vector<double>(b.rho.size()));
#pragma omp parallel for schedule(dynamic)
  for (long long q = 0; q < static_cast<long long>(b.rho.size()); ++q) {
    const double rho = b.rho[q];
    const auto a = band_coefficients(M, b, n, rho);
    const double wq = b.w[q] * std::pow(rho, d2 - 1 + n);
    total[q] = wq * tail(a, 0.0);
    for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
      const double R = c_values[ci] * std::ldexp(1.0, ell);
      outside[ci][q] = wq * tail(a, 0.5 * rho * R * R);
    }
  }
  const double tot = pairwise_sum(std::span<const double>(total));
  for (std::size_t ci = 0; ci < c_values.size(); ++ci)
    r.add(c_values[ci], tot > 0 ? pairwise_sum(std::span<const double>(outside[ci])) / tot : 0.0);
  r.degenerate = !(tot > 0);
  return r;
}

GridFunction quasi_ball_bump(const Grid& grid, const HTypeGroup& G, double radius) {
  const int d1 = G.d1(), d2 = G.d2();
  if (grid.dims() != d1 + d2) throw GridMismatch("quasi_ball_bump: grid must cover g1 x g2");
  return GridFunction::sample(grid, [&](const double* z) {
    Point g{Eigen::Map<const Eigen::VectorXd>(z, d1), Eigen::Map<const Eigen::VectorXd>(z + d1, d2)};
    // s^4 = (|x|^4 + |u|^2) / radius^4 is a polynomial, so the bump is smooth at the origin too
    const double s2 = homogeneous_norm(g) / radius, s4 = s2 * s2 * s2 * s2;
    return std::complex<double>(s4 < 1 ? std::exp(-1.0 / (1 - s4)) : 0.0, 0.0);
  });
}

PropagationReport propagation_check(const HTypeGroup& G, const GridFunction& f, double t,
                                    const PropagationOptions& opt) {
  const int d1 = G.d1(), d2 = G.d2();
  const bool cut = opt.cutoff >= 0;
  const double hi = cut ? std::ldexp(1.0, opt.cutoff + 1) : std::numeric_limits<double>::infinity();
  const int J = opt.cutoff;
  const MultiplierSpec wave(
      [t, J, cut](double lam) {
        const double c = std::cos(t * std::sqrt(std::max(lam, 0.0)));
        return std::complex<double>(cut ? c * lowpass(J, lam) : c, 0.0);
      },
      0.0, hi, false, "cos(t sqrt L) cutoff");
  const MultiplierSpec eta([J, cut](double lam) { return std::complex<double>(cut ? lowpass(J, lam) : 1.0, 0.0); }, 0.0,
                           hi, false, "cutoff");
  ApplyOptions ao;
  ao.lambda_max = opt.lambda_max;
  ApplyReport rep;
  const GridFunction out = apply_multiplier(JointMultiplier::of_L(wave), f, G, ao, &rep);
  const GridFunction low = apply_multiplier(JointMultiplier::of_L(eta), f, G, ao);

  PropagationReport pr;
  pr.t = t;
  pr.kappas = opt.kappas;
  pr.wrap_fraction = rep.wrap_fraction;
  const Grid& g = f.grid;
  std::vector<double> z(g.dims()), qn(g.size()), e(g.size()), dl(g.size()), dc(g.size()), ef(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    g.coords(p, z.data());
    qn[p] = homogeneous_norm(Point{Eigen::Map<const Eigen::VectorXd>(z.data(), d1),
                                   Eigen::Map<const Eigen::VectorXd>(z.data() + d1, d2)});
    e[p] = std::norm(out.v[p]);
    ef[p] = std::norm(f.v[p]);
    dl[p] = std::norm(f.v[p] - low.v[p]);
    dc[p] = std::norm(out.v[p] - f.v[p]);
  }
  const double tot = pairwise_sum(std::span<const double>(e));
  const double nf = pairwise_sum(std::span<const double>(ef));
  for (double kappa : opt.kappas) {
    const double R = kappa * (opt.radius + std::abs(t));
    std::vector<double> o(g.size(), 0.0);
    for (std::size_t p = 0; p < g.size(); ++p)
      if (qn[p] > R) o[p] = e[p];
    pr.outside.push_back(tot > 0 ? pairwise_sum(std::span<const double>(o)) / tot : 0.0);
  }
  pr.leakage = nf > 0 ? pairwise_sum(std::span<const double>(dl)) / nf : 0.0;
  pr.relative_change = nf > 0 ? std::sqrt(pairwise_sum(std::span<const double>(dc)) / nf) : 0.0;
  return pr;
}

}  // namespace htlab
