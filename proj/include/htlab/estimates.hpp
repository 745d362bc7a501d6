#pragma once

#include <cstdint>
#include <vector>

#include "htlab/grid.hpp"
#include "htlab/group.hpp"
#include "htlab/multiplier.hpp"
#include "htlab/scan_report.hpp"

namespace htlab {

// Thresholds frozen after the first calibration run on the reference configurations.
/// Outside mass fraction at c = 4 for Heisenberg n = 1, iota = 5, ell = 3, F = bump(1, 1/2) (measured 1.6e-3).
inline constexpr double kSupportTheta = 5e-3;
/// Outside energy fraction at kappa = 3, t = 1 for quasi_ball_bump(radius 1) on Heisenberg n = 1,
/// grid [-8, 8]^2 x [-16, 16) with 65 x 65 x 256 points, cutoff J = 4 (measured 7.6e-6).
inline constexpr double kPropagationTheta = 1e-4;
/// Gaussian lower bound / (2^{-ell d2 (1/p - 1/2)} ||F||_2) for F = bump(1, 1/2) (largest measured 0.17).
inline constexpr double kLowerBoundC = 0.5;

/// Radial rule in rho = |mu| for the band of a truncated multiplier: breakpoints
/// at lambda_lo/[k] and lambda_hi/[k] for every k in the band, Gauss-Legendre
/// panels in between.
struct BandRule {
  int kmin = 0, kmax = -1;
  std::vector<double> rho, w;
};

struct BandOptions {
  /// Panels per breakpoint interval (>= 1).
  int panels = 2;
  /// Oscillation frequency of the multiplier in s = sqrt(lambda); adds panels for Fourier pieces.
  double frequency = 0.0;
};

/// Throws DomainError for an empty band.
BandRule band_rule(const JointMultiplier& M, int n, const BandOptions& opt = {});

/// Weight in the weighted Plancherel integral.
enum class Weight { Power, PowerAboveOne };  // |x|^{2 alpha} or max(|x|, 1)^{2 alpha}

/// (int |x|^{2 alpha} |K_ell(x, u)|^2 dx du)^{1/2} for the kernel of F_ell(L, U) =
/// F(sqrt L) chi_ell(L / |U|): Plancherel in u, then per rho node the radial
/// integral in t = rho |x|^2 / 2 by Gauss-Laguerre. alpha in [0, 4].
double weighted_norm(const MultiplierSpec& F, const HTypeGroup& G, double alpha, int ell,
                     Weight weight = Weight::Power, const BandOptions& opt = {});

/// weighted_norm over ell = ell_lo..ell_hi; expected slope alpha - d2/2.
ScanReport weighted_plancherel_scan(const MultiplierSpec& F, const HTypeGroup& G, double alpha, int ell_lo,
                                    int ell_hi, Weight weight = Weight::Power, const BandOptions& opt = {});

/// ||F_ell(L, U)||_{1 -> 2} = ||K_ell||_2 by the spectral-side Plancherel formula
///   c^2 (2 pi)^{n - d2} |S^{d2-1}| sum_k chi_ell([k])^2 C(k+n-1, k) [k]^{-(d2+n)} int lam^{d2+n-1} |F(sqrt lam)|^2 dlam.
double restriction_norm_p1(const MultiplierSpec& F, const HTypeGroup& G, int ell);

/// restriction_norm_p1 over ell; expected slope -d2/2. Metadata carries the ratios
/// ||K_ell||_2 / (2^{-ell d2 / 2} ||F||_2).
ScanReport restriction_scan(const MultiplierSpec& F, const HTypeGroup& G, int ell_lo, int ell_hi);

struct SpatialOptions {
  /// Radial and central extents; 0 picks them from the band.
  double r_max = 0.0;
  double u_max = 0.0;
  int refine = 1;
  /// Weight r^{2 alpha}; 0 gives ||K_ell||_2.
  double alpha = 0.0;
};

/// ||K_ell||_2 (or its |x|^alpha-weighted version) from the kernel evaluated on an
/// (r, u) quadrature grid (groups with d2 = 1 only): int |S^{2n-1}| r^{2n-1+2 alpha} |K(r, u)|^2 dr du.
double restriction_norm_spatial(const MultiplierSpec& F, const HTypeGroup& G, int ell, const SpatialOptions& opt = {});

struct DiscreteRestriction {
  int n = 0, k = 0;
  double rho = 0.0;
  double value = 0.0;       // ((2 pi)^n rho^n C(k+n-1, k))^{1/2}
  double quadrature = 0.0;  // ||phi_k^rho||_2 by radial quadrature
  double shape = 0.0;       // rho^{n/2} [k]^{(n-1)/2}
  double ratio = 0.0;       // value / shape
};

/// ||Pi_k^mu||_{1 -> 2} = ||phi_k^{|mu|}||_2 with a quadrature cross-check. k <= 50.
DiscreteRestriction discrete_restriction_p1(int n, int k, double rho);

struct LowerBound {
  double value = 0.0;  // best ||F_ell(L,U) f||_2 / ||f||_p
  double sigma = 0.0, tau = 0.0;
  double shape = 0.0;  // 2^{-ell d2 (1/p - 1/2)} ||F||_2
  double ratio = 0.0;  // value / shape
  bool outside_range = false;
};

/// Lower bound for ||F_ell(L, U)||_{p -> 2} from Gaussian test functions
/// exp(-|x|^2 / 2 sigma^2) exp(-|u|^2 / 2 tau^2) with log-uniform random widths.
/// Throws DomainError for p outside [1, 2(d2+1)/(d2+3)] unless `force`.
LowerBound restriction_lower_bound(const MultiplierSpec& F, const HTypeGroup& G, int ell, double p, int trials,
                                   std::uint64_t seed, bool force = false);

/// ||F_ell(L, U) f||_2 for the Gaussian test function with widths sigma, tau (exact radial reduction).
double gaussian_response_norm(const MultiplierSpec& F, const HTypeGroup& G, int ell, double sigma, double tau);
/// ||f||_p of that test function.
double gaussian_lp_norm(const HTypeGroup& G, double sigma, double tau, double p);

/// Fraction of the squared L2 mass of K^{(iota)}_ell (kernel of (F^{(iota)} psi)(sqrt L) chi_ell(L/|U|))
/// in |x| > c 2^ell, per c. Requires ell <= iota.
ScanReport essential_support_scan(const MultiplierSpec& F, const HTypeGroup& G, int iota, int ell,
                                  const std::vector<double>& c_values, const FourierGrid& grid = {});

struct PropagationOptions {
  /// Smooth high-frequency cutoff lowpass(J, lambda); J < 0 disables it.
  int cutoff = 4;
  /// Spectral cap when the cutoff is disabled.
  double lambda_max = 256.0;
  /// Radius of the quasi-ball containing supp f.
  double radius = 1.0;
  std::vector<double> kappas{1.0, 2.0, 3.0, 4.0};
};

struct PropagationReport {
  double t = 0.0;
  std::vector<double> kappas;
  /// Energy fraction of cos(t sqrt L) f outside the quasi-ball of radius kappa (radius + |t|).
  std::vector<double> outside;
  /// ||f - eta(L) f||^2 / ||f||^2 for the cutoff eta alone.
  double leakage = 0.0;
  double wrap_fraction = 0.0;
  double relative_change = 0.0;  // ||cos(t sqrt L) f - f|| / ||f||
};

/// Finite-propagation soft check on g1 x g2 via apply_multiplier.
PropagationReport propagation_check(const HTypeGroup& G, const GridFunction& f, double t,
                                    const PropagationOptions& opt = {});

/// exp(-1 / (1 - s^4)) for s = |g| / radius < 1 (homogeneous norm), else 0.
GridFunction quasi_ball_bump(const Grid& grid, const HTypeGroup& G, double radius);

}  // namespace htlab
