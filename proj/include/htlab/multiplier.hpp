#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace htlab {

/// chi(lambda): even smooth bump on 1/2 < |lambda| < 2 with sum_j chi(lambda / 2^j) = 1 for lambda != 0.
double dyadic_chi(double lambda);
/// chi_j(lambda) = chi(lambda / 2^j).
double dyadic_bump(int j, double lambda);
/// psi = chi_{-2} + ... + chi_2; equals 1 on 1/4 <= |lambda| <= 4, supported in [1/8, 8].
double psi_window(double lambda);
/// Smooth low-pass: 1 for |lambda| <= 2^J, 0 for |lambda| >= 2^{J+1}, chi_J in between.
double lowpass(int J, double lambda);

/// One-variable multiplier with declared support. Outside the support the
/// value is zero by construction. For even multipliers the support is
/// {lo <= |s| <= hi} and F(-s) = F(s).
class MultiplierSpec {
 public:
  using Fn = std::function<std::complex<double>(double)>;

  MultiplierSpec();  // the zero multiplier
  MultiplierSpec(Fn f, double lo, double hi, bool even, std::string label, nlohmann::json description = {});

  std::complex<double> operator()(double s) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool even() const { return even_; }
  bool is_zero() const { return zero_; }
  const std::string& label() const { return label_; }
  /// JSON description sufficient to rebuild the multiplier (when it has one).
  const nlohmann::json& description() const { return desc_; }
  /// Known oscillation frequency in s (radians per unit), 0 if none; sizes quadratures.
  double oscillation() const { return osc_; }
  MultiplierSpec& with_oscillation(double omega) {
    osc_ = omega;
    return *this;
  }

  /// Samples on the fine grid of 4097 points over [lo, hi] (bounded support only).
  const std::vector<std::complex<double>>& samples() const;
  /// (int_lo^hi |F(s)|^2 ds)^{1/2}, i.e. the norm over the positive half-line; inf for unbounded support.
  double l2_norm() const;
  double sup_norm() const;

  /// Smooth bump e * exp(-1/(1 - t^2)), t = (s - center) / halfwidth; peak value `height`.
  static MultiplierSpec bump(double center, double halfwidth, bool even = true, double height = 1.0);
  /// bump(center, halfwidth) * cos(omega s).
  static MultiplierSpec wave_packet(double center, double halfwidth, double omega);
  /// Piecewise-linear table on increasing abscissae.
  static MultiplierSpec table(std::vector<double> x, std::vector<std::complex<double>> y);
  /// (1 - t lambda)_+^delta; t = 0 gives the constant 1 on [0, inf).
  static MultiplierSpec bochner_riesz(double delta, double t);
  /// Constant on [lo, hi].
  static MultiplierSpec constant(std::complex<double> c, double lo, double hi);
  /// F * psi (support intersected with [1/8, 8]).
  static MultiplierSpec windowed(const MultiplierSpec& F);
  /// Pointwise product; support is the intersection.
  static MultiplierSpec product(const MultiplierSpec& F, const MultiplierSpec& G);
  /// From {"kind": "bump" | "wave_packet" | "bochner_riesz" | "table" | "constant", ..., "window": "psi"?}.
  static MultiplierSpec from_json(const nlohmann::json& j);

 private:
  Fn f_;
  double lo_ = 0.0, hi_ = 0.0;
  bool even_ = false;
  bool zero_ = true;
  double osc_ = 0.0;
  std::string label_ = "zero";
  nlohmann::json desc_;
  mutable std::shared_ptr<std::vector<std::complex<double>>> cache_;
};

/// Periodic discretization used by fourier_localize.
struct FourierGrid {
  double period = 32.0;
  int points = 16384;
};

/// F^(iota) = (F^ chi_iota)^v: F sampled on the periodic grid, transformed,
/// windowed by chi_iota in frequency and evaluated as a trigonometric sum over
/// the surviving modes. Requires F even with support inside [1/2, 2];
/// throws DomainError when 2^{iota+1} exceeds the Nyquist frequency.
MultiplierSpec fourier_localize(const MultiplierSpec& F, int iota, const FourierGrid& grid = {});
/// The part of F not covered by iota >= 0: window 1 - sum_{iota >= 0} chi_iota (the
/// zero mode included), so F = remainder + sum_iota F^(iota) up to the Nyquist band.
MultiplierSpec fourier_remainder(const MultiplierSpec& F, const FourierGrid& grid = {});

/// Joint multiplier F(lambda, rho) of (L, U) depending on mu through rho = |mu|.
/// Besides the callable it carries the supports the kernel synthesis needs.
class JointMultiplier {
 public:
  JointMultiplier() = default;
  /// F(L): M(lambda, rho) = F(lambda).
  static JointMultiplier of_L(const MultiplierSpec& F);
  /// F(sqrt L): M(lambda, rho) = F(sqrt lambda).
  static JointMultiplier of_sqrtL(const MultiplierSpec& F);
  /// F_ell(lambda, rho) = F(sqrt lambda) chi_ell(lambda / rho) for rho != 0, else 0.
  static JointMultiplier truncated(const MultiplierSpec& F, int ell);
  /// sum_{ell = -1}^{L} F_ell.
  static JointMultiplier truncated_sum(const MultiplierSpec& F, int L);

  std::complex<double> operator()(double lambda, double rho) const;
  /// Value on the k-th eigenvalue branch: M([k] rho, rho).
  std::complex<double> at_k(int k, int n, double rho) const;
  /// Truncation factor at a bracket value [k] (1 when untruncated).
  double truncation_at(double bracket) const { return trunc_ ? trunc_(bracket) : 1.0; }
  /// The function of |xi|^2 applied to the mu = 0 mode (limit rho -> 0+); empty when that limit vanishes.
  const std::function<std::complex<double>(double)>& euclidean() const { return euclid_; }

  /// Spectral support in lambda = [k] rho.
  double lambda_lo() const { return lam_lo_; }
  double lambda_hi() const { return lam_hi_; }
  /// Admissible range of [k] (from the truncation), [0, inf) when untruncated.
  double bracket_lo() const { return br_lo_; }
  double bracket_hi() const { return br_hi_; }
  bool is_zero() const { return zero_; }
  const std::string& label() const { return label_; }

 private:
  std::function<std::complex<double>(double)> base_;   // of lambda
  std::function<double(double)> trunc_;                // of lambda / rho; empty = untruncated
  std::function<std::complex<double>(double)> euclid_;
  double lam_lo_ = 0.0, lam_hi_ = 0.0;
  double br_lo_ = 0.0, br_hi_ = std::numeric_limits<double>::infinity();
  bool zero_ = true;
  std::string label_;
};

}  // namespace htlab
