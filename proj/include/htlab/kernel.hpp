#pragma once

#include <complex>
#include <vector>

#include "htlab/grid.hpp"
#include "htlab/group.hpp"
#include "htlab/multiplier.hpp"

namespace htlab {

/// Radial rule and coefficients of one eigenvalue branch k: nodes rho_q in |mu|,
/// weights w_q (including rho^{d2-1}) and coef_q = M([k] rho_q, rho_q).
struct SpectralTerm {
  int k = 0;
  std::vector<double> rho;
  std::vector<double> w;
  std::vector<std::complex<double>> coef;
};

struct KernelOptions {
  /// Lower cutoff on |mu|; makes the k-range finite for untruncated multipliers.
  double mu_min = 1.0 / 1024;
  /// Largest |x| and |u| the radial rules must resolve (raised to the grid extent when a grid is given).
  double x_max = 0.0;
  double u_max = 0.0;
  /// Extra factor on the number of radial panels (>= 1).
  int refine = 1;
  /// Sphere rule level for d2 >= 2 when sampling.
  int sphere_level = -1;  // -1: adaptive to 1e-8
};

/// Convolution kernel of M(L, U):
///   K(x, u) = c_n (2 pi)^{-d2} sum_k int M([k]|mu|, |mu|) phi_k^{|mu|}(x) e^{i <mu, u>} dmu,
/// in polar form. The spectral record holds the radial rules; spatial samples
/// exist when a grid over g1 x g2 was supplied.
class KernelTable {
 public:
  int n = 0;
  int d2 = 0;
  double prefactor = 0.0;  // c_n (2 pi)^{-d2}
  double mu_min = 0.0;
  std::vector<SpectralTerm> record;
  /// Squared L2 norm of the part of the kernel removed by mu_min (spectral side).
  double excluded_norm_sq = 0.0;
  Grid grid;
  std::vector<std::complex<double>> samples;

  bool has_samples() const { return !samples.empty(); }
  std::size_t term_count() const;
  /// Re-synthesis from the spectral record at one point.
  std::complex<double> evaluate(const double* x, const double* u) const;
  /// Radial form K(r, s) with r = |x|, s = |u|.
  std::complex<double> evaluate_radial(double r, double s) const;
  /// ||K||_2^2 by Plancherel: c^2 (2 pi)^{-d2} |S^{d2-1}| sum_k int rho^{d2-1} |M|^2 ||phi_k^rho||^2 drho.
  double spectral_norm_sq() const;
  /// Trapezoidal ||K||_2^2 over the sample grid.
  double grid_norm_sq() const;
};

/// Builds the kernel table. Throws DomainError for an unbounded k-range
/// (unbounded lambda-support, or untruncated with mu_min = 0).
KernelTable synthesize_kernel(const JointMultiplier& M, const HTypeGroup& G, const Grid* grid = nullptr,
                              const KernelOptions& opt = {});

struct ApplyOptions {
  /// Spectral cap for multipliers with unbounded lambda-support: branches with [k]|mu| > lambda_max are dropped.
  double lambda_max = 0.0;
  /// Wrap-around guard on the periodic central box.
  bool check_wrap = true;
  double wrap_tol = 1e-4;
};

struct ApplyReport {
  int modes = 0;            // nonzero central modes processed
  int max_k = -1;           // largest eigenvalue branch used
  bool euclidean_zero_mode = false;
  double wrap_fraction = 0.0;  // output energy in the outer quarter of the central box
};

/// M(L, U) f for f sampled on g1 x g2: closed odd symmetric axes on g1 and
/// periodic axes on g2. Per central mode mu != 0 the branches are combined into
/// one radial kernel and applied in kernel form; mu = 0 gets the Euclidean
/// multiplier M(|xi|^2, 0+) (or 0 when that limit vanishes).
/// Throws AccuracyError when the wrap-around energy exceeds wrap_tol.
GridFunction apply_multiplier(const JointMultiplier& M, const GridFunction& f, const HTypeGroup& G,
                              const ApplyOptions& opt = {}, ApplyReport* report = nullptr);

/// Group convolution (f * K)(g) = int f(h) K(h^{-1} g) dh at the given points,
/// with K taken from its spectral record: the central integral is done against
/// f's samples for every radial node and sphere direction.
std::vector<std::complex<double>> group_convolve(const GridFunction& f, const KernelTable& K, const HTypeGroup& G,
                                                 const std::vector<Point>& targets, int sphere_level = 0);

}  // namespace htlab
