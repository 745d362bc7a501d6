#include "htlab/multiplier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "htlab/errors.hpp"
#include "htlab/parallel.hpp"
#include "htlab/quadrature.hpp"
#include "htlab/specfun.hpp"

namespace htlab {

using cplx = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double vbump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

// w(tau) = v(tau) / sum_m v(tau - m); only m in {-1, 0, 1} can contribute for |tau| < 1.
double wpart(double tau) {
  if (!(std::abs(tau) < 1.0)) return 0.0;
  const double v0 = vbump(tau);
  const double den = v0 + vbump(tau - 1.0) + vbump(tau + 1.0);
  return v0 / den;
}

// log2|lambda| - j computed through frexp so that scaling by 2^j is exact.
double dyadic_tau(int j, double lambda) {
  int e = 0;
  const double m = std::frexp(std::abs(lambda), &e);
  return static_cast<double>(e - j) + std::log2(m);
}

}  // namespace

double dyadic_chi(double lambda) { return dyadic_bump(0, lambda); }

double dyadic_bump(int j, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda)) return 0.0;
  return wpart(dyadic_tau(j, lambda));
}

double psi_window(double lambda) {
  double s = 0.0;
  for (int j = -2; j <= 2; ++j) s += dyadic_bump(j, lambda);
  return s;
}

double lowpass(int J, double lambda) {
  if (lambda == 0.0) return 1.0;
  const double tau = dyadic_tau(J, lambda);
  if (tau <= 0.0) return 1.0;
  if (tau >= 1.0) return 0.0;
  return wpart(tau);
}

// ---------------------------------------------------------------- MultiplierSpec

MultiplierSpec::MultiplierSpec() : f_([](double) { return cplx(0.0); }), desc_({{"kind", "zero"}}) {}

MultiplierSpec::MultiplierSpec(Fn f, double lo, double hi, bool even, std::string label, nlohmann::json description)
    : f_(std::move(f)), lo_(lo), hi_(hi), even_(even), zero_(false), label_(std::move(label)),
      desc_(std::move(description)) {
  if (!(lo <= hi)) throw DomainError("multiplier support needs lo <= hi");
  if (even && lo < 0) throw DomainError("even multiplier support is given on the positive side");
}

cplx MultiplierSpec::operator()(double s) const {
  if (zero_) return 0.0;
  const double t = even_ ? std::abs(s) : s;
  if (t < lo_ || t > hi_) return 0.0;
  return f_(t);
}

const std::vector<cplx>& MultiplierSpec::samples() const {
  if (!std::isfinite(hi_)) throw DomainError("samples need bounded support");
  static std::mutex mu;
  std::lock_guard lock(mu);
  if (!cache_) {
    auto c = std::make_shared<std::vector<cplx>>(4097);
    for (int i = 0; i < 4097; ++i) (*c)[i] = (*this)(lo_ + (hi_ - lo_) * i / 4096.0);
    cache_ = c;
  }
  return *cache_;
}

double MultiplierSpec::l2_norm() const {
  if (zero_) return 0.0;
  if (!std::isfinite(hi_)) return kInf;
  if (hi_ == lo_) return 0.0;
  const Rule r = composite_legendre(lo_, hi_, 64, 16);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::norm((*this)(r.x[i]));
  return std::sqrt(s);
}

double MultiplierSpec::sup_norm() const {
  if (zero_) return 0.0;
  double m = 0.0;
  for (const cplx& v : samples()) m = std::max(m, std::abs(v));
  return m;
}

MultiplierSpec MultiplierSpec::bump(double center, double halfwidth, bool even, double height) {
  if (!(halfwidth > 0)) throw DomainError("bump needs a positive half-width");
  if (even && center - halfwidth < 0) throw DomainError("even bump must sit on the positive side");
  auto f = [=](double s) { return cplx(height * std::exp(1.0) * vbump((s - center) / halfwidth)); };
  return MultiplierSpec(f, center - halfwidth, center + halfwidth, even, "bump",
                        {{"kind", "bump"}, {"center", center}, {"halfwidth", halfwidth}, {"even", even}, {"height", height}});
}

MultiplierSpec MultiplierSpec::wave_packet(double center, double halfwidth, double omega) {
  const MultiplierSpec B = bump(center, halfwidth);
  auto f = [B, omega](double s) { return B(s) * std::cos(omega * s); };
  MultiplierSpec F(f, B.lo(), B.hi(), true, "wave_packet",
                   {{"kind", "wave_packet"}, {"center", center}, {"halfwidth", halfwidth}, {"omega", omega}});
  return F.with_oscillation(std::abs(omega));
}

MultiplierSpec MultiplierSpec::table(std::vector<double> x, std::vector<cplx> y) {
  if (x.size() < 2 || x.size() != y.size()) throw DomainError("table needs >= 2 matching points");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("table abscissae must increase");
  nlohmann::json jx = x, jre = nlohmann::json::array(), jim = nlohmann::json::array();
  for (const cplx& v : y) {
    jre.push_back(v.real());
    jim.push_back(v.imag());
  }
  const double lo = x.front(), hi = x.back();
  auto f = [x = std::move(x), y = std::move(y)](double s) {
    const auto it = std::upper_bound(x.begin(), x.end(), s);
    if (it == x.begin()) return y.front();
    if (it == x.end()) return y.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (s - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - t) * y[i - 1] + t * y[i];
  };
  return MultiplierSpec(f, lo, hi, false, "table", {{"kind", "table"}, {"x", jx}, {"re", jre}, {"im", jim}});
}

MultiplierSpec MultiplierSpec::bochner_riesz(double delta, double t) {
  if (!(delta > 0)) throw DomainError("bochner_riesz needs delta > 0");
  if (t < 0) throw DomainError("bochner_riesz needs t >= 0");
  const nlohmann::json d = {{"kind", "bochner_riesz"}, {"delta", delta}, {"t", t}};
  if (t == 0) return MultiplierSpec([](double) { return cplx(1.0); }, 0.0, kInf, false, "bochner_riesz", d);
  auto f = [=](double s) {
    const double b = 1.0 - t * s;
    return cplx(b > 0 ? std::pow(b, delta) : 0.0);
  };
  return MultiplierSpec(f, 0.0, 1.0 / t, false, "bochner_riesz", d);
}

MultiplierSpec MultiplierSpec::constant(cplx c, double lo, double hi) {
  return MultiplierSpec([c](double) { return c; }, lo, hi, false, "constant",
                        {{"kind", "constant"}, {"re", c.real()}, {"im", c.imag()}, {"lo", lo}, {"hi", hi}});
}

MultiplierSpec MultiplierSpec::product(const MultiplierSpec& F, const MultiplierSpec& G) {
  if (F.is_zero() || G.is_zero()) return MultiplierSpec();
  const bool even = F.even() && G.even();
  // Mixed products are taken on the positive side, where one-sided multipliers live.
  const double lo = std::max(F.lo(), G.lo());
  const double hi = std::min(F.hi(), G.hi());
  if (!(lo <= hi)) return MultiplierSpec();
  auto f = [F, G](double s) { return F(s) * G(s); };
  MultiplierSpec P(f, lo, hi, even, F.label() + "*" + G.label(),
                   {{"kind", "product"}, {"factors", {F.description(), G.description()}}});
  return P.with_oscillation(F.oscillation() + G.oscillation());
}

MultiplierSpec MultiplierSpec::windowed(const MultiplierSpec& F) {
  if (F.is_zero()) return F;
  const double lo = std::max(F.even() ? F.lo() : std::max(F.lo(), 0.0), 0.125);
  const double hi = std::min(F.hi(), 8.0);
  if (!(lo <= hi)) return MultiplierSpec();
  nlohmann::json d = F.description();
  if (d.is_object()) d["window"] = "psi";
  MultiplierSpec W([F](double s) { return F(s) * psi_window(s); }, lo, hi, F.even(), F.label() + "*psi", d);
  return W.with_oscillation(F.oscillation());
}

MultiplierSpec MultiplierSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  MultiplierSpec F;
  if (kind == "bump") {
    F = bump(j.at("center").get<double>(), j.at("halfwidth").get<double>(), j.value("even", true), j.value("height", 1.0));
  } else if (kind == "wave_packet") {
    F = wave_packet(j.at("center").get<double>(), j.at("halfwidth").get<double>(), j.at("omega").get<double>());
  } else if (kind == "bochner_riesz") {
    F = bochner_riesz(j.at("delta").get<double>(), j.at("t").get<double>());
  } else if (kind == "table") {
    const auto x = j.at("x").get<std::vector<double>>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    if (re.size() != x.size() || im.size() != x.size()) throw DomainError("table columns differ in length");
    std::vector<cplx> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = {re[i], im[i]};
    F = table(x, y);
  } else if (kind == "constant") {
    F = constant({j.at("re").get<double>(), j.value("im", 0.0)}, j.at("lo").get<double>(), j.at("hi").get<double>());
  } else if (kind == "zero") {
    return MultiplierSpec();
  } else {
    throw DomainError("unknown multiplier kind '" + kind + "'");
  }
  if (j.value("window", std::string()) == "psi") F = windowed(F);
  return F;
}

// ---------------------------------------------------------------- Fourier localization

namespace {

struct ModeSum {
  double s0 = 0.0;
  std::vector<double> xi;
  std::vector<cplx> c;  // already divided by the point count

  cplx operator()(double s) const {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < xi.size(); ++m) acc += c[m] * std::polar(1.0, xi[m] * (s - s0));
    return acc;
  }
};

template <class Window>
ModeSum windowed_modes(const MultiplierSpec& F, const FourierGrid& g, Window window) {
  if (g.points < 16 || g.points % 2 != 0 || !(g.period > 0)) throw DomainError("Fourier grid needs an even point count >= 16");
  const int M = g.points;
  const double P = g.period, s0 = -P / 2;
  fftw_complex* buf = fftw_alloc_complex(M);
  for (int j = 0; j < M; ++j) {
    const cplx v = F(s0 + j * P / M);
    buf[j][0] = v.real();
    buf[j][1] = v.imag();
  }
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(M, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  ModeSum out;
  out.s0 = s0;
  for (int m = 0; m < M; ++m) {
    const int mm = m < M / 2 ? m : m - M;
    const double xi = 2 * M_PI * mm / P;
    const double w = window(xi);
    if (w == 0.0) continue;
    out.xi.push_back(xi);
    out.c.push_back(w * cplx(buf[m][0], buf[m][1]) / static_cast<double>(M));
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

void require_localizable(const MultiplierSpec& F) {
  if (F.is_zero()) return;
  if (!F.even() || F.lo() < 0.5 - 1e-12 || F.hi() > 2.0 + 1e-12)
    throw DomainError("fourier_localize needs an even multiplier supported in 1/2 <= |s| <= 2");
}

}  // namespace

MultiplierSpec fourier_localize(const MultiplierSpec& F, int iota, const FourierGrid& grid) {
  if (iota < 0) throw DomainError("fourier_localize needs iota >= 0");
  const double nyquist = M_PI * grid.points / grid.period;
  if (std::ldexp(1.0, iota + 1) > nyquist) throw DomainError("fourier_localize: 2^(iota+1) exceeds the Nyquist frequency");
  require_localizable(F);
  if (F.is_zero()) return F;
  auto modes = std::make_shared<ModeSum>(windowed_modes(F, grid, [iota](double xi) { return dyadic_bump(iota, xi); }));
  nlohmann::json d = {{"kind", "fourier_localized"}, {"iota", iota}, {"base", F.description()},
                      {"period", grid.period}, {"points", grid.points}};
  return MultiplierSpec([modes](double s) { return (*modes)(s); }, 0.0, grid.period / 2, true,
                        F.label() + "^(" + std::to_string(iota) + ")", d);
}

MultiplierSpec fourier_remainder(const MultiplierSpec& F, const FourierGrid& grid) {
  require_localizable(F);
  if (F.is_zero()) return F;
  auto window = [](double xi) {
    const double a = std::abs(xi);
    if (a >= 2.0) return 0.0;
    return 1.0 - dyadic_bump(0, xi) - dyadic_bump(1, xi);
  };
  auto modes = std::make_shared<ModeSum>(windowed_modes(F, grid, window));
  nlohmann::json d = {{"kind", "fourier_remainder"}, {"base", F.description()}, {"period", grid.period}, {"points", grid.points}};
  return MultiplierSpec([modes](double s) { return (*modes)(s); }, 0.0, grid.period / 2, true, F.label() + "^(<0)", d);
}

// ---------------------------------------------------------------- JointMultiplier

JointMultiplier JointMultiplier::of_L(const MultiplierSpec& F) {
  JointMultiplier m;
  if (F.is_zero()) return m;
  m.base_ = [F](double lam) { return F(lam); };
  m.euclid_ = m.base_;
  m.lam_lo_ = F.even() ? F.lo() : std::max(F.lo(), 0.0);
  m.lam_hi_ = F.hi();
  m.zero_ = false;
  m.label_ = F.label() + "(L)";
  return m;
}

JointMultiplier JointMultiplier::of_sqrtL(const MultiplierSpec& F) {
  JointMultiplier m;
  if (F.is_zero()) return m;
  m.base_ = [F](double lam) { return lam >= 0 ? F(std::sqrt(lam)) : cplx(0.0); };
  m.euclid_ = m.base_;
  const double lo = F.even() ? F.lo() : std::max(F.lo(), 0.0);
  m.lam_lo_ = lo * lo;
  m.lam_hi_ = F.hi() * F.hi();
  m.zero_ = false;
  m.label_ = F.label() + "(sqrt L)";
  return m;
}

JointMultiplier JointMultiplier::truncated(const MultiplierSpec& F, int ell) {
  if (ell < -1) throw DomainError("truncation index must be >= -1");
  JointMultiplier m = of_sqrtL(F);
  if (m.zero_) return m;
  m.trunc_ = [ell](double t) { return dyadic_bump(ell, t); };
  m.euclid_ = nullptr;
  m.br_lo_ = std::ldexp(1.0, ell - 1);
  m.br_hi_ = std::ldexp(1.0, ell + 1);
  m.label_ = F.label() + "_" + std::to_string(ell);
  return m;
}

JointMultiplier JointMultiplier::truncated_sum(const MultiplierSpec& F, int L) {
  if (L < -1) throw DomainError("truncation index must be >= -1");
  JointMultiplier m = of_sqrtL(F);
  if (m.zero_) return m;
  m.trunc_ = [L](double t) {
    double s = 0.0;
    for (int l = -1; l <= L; ++l) s += dyadic_bump(l, t);
    return s;
  };
  m.euclid_ = nullptr;
  m.br_lo_ = 0.25;
  m.br_hi_ = std::ldexp(1.0, L + 1);
  m.label_ = F.label() + "_<=" + std::to_string(L);
  return m;
}

cplx JointMultiplier::operator()(double lambda, double rho) const {
  if (zero_) return 0.0;
  if (!trunc_) return base_(lambda);
  if (rho == 0.0) return 0.0;
  return base_(lambda) * trunc_(lambda / rho);
}

cplx JointMultiplier::at_k(int k, int n, double rho) const {
  if (zero_) return 0.0;
  const double br = bracket(k, n);
  if (!trunc_) return base_(br * rho);
  if (rho == 0.0) return 0.0;
  const double t = trunc_(br);
  return t == 0.0 ? cplx(0.0) : base_(br * rho) * t;
}

}  // namespace htlab
