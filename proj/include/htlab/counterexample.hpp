#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htlab/grid.hpp"
#include "htlab/specfun.hpp"

namespace htlab {

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0, den = 1;

  Rational() = default;
  Rational(std::int64_t p, std::int64_t q = 1);
  /// "p" or "p/q".
  static Rational parse(const std::string& s);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend Rational operator*(const Rational& a, const Rational& b);
};

/// Exact eigenvalues of g = Phi_{nu,nu'}^1 for H = -Delta + |z|^2/4 and A = L0^1,
/// the ratio eigH / eigA, and the measured quadratic forms (all divided by ||g||^2).
struct CounterexampleRow {
  int n = 0;
  MultiIndex nu, nup;
  std::int64_t eig_h = 0;  // |nu| + |nu'| + n
  std::int64_t eig_a = 0;  // 2 |nu| + n
  Rational ratio;
  double form_h = 0.0, form_a = 0.0;  // (Hg, g), (Ag, g)
  double grad_sq = 0.0;               // ||grad g||^2
  double potential = 0.0;             // ||(|z| / 2) g||^2
  double eig_error = 0.0;             // max relative error of form_h, form_a against eig_h, eig_a
  double identity_error = 0.0;        // |form_h - grad_sq - potential| / form_h
  bool summands_ok = false;           // grad_sq, potential <= form_h (1 + 1e-3)
  std::uint32_t flags = 0;            // GridFlags of the sampled coefficient
};

/// Largest |nu| + |nu'| accepted by counterexample_row.
inline constexpr int kCounterexampleBudget = 20;

/// Builds the row on a closed symmetric grid over R^{2n}.
CounterexampleRow counterexample_row(const MultiIndex& nu, const MultiIndex& nup, const Grid& grid);

struct RefutationStep {
  int level = 0;  // |nu'|, realized as nu' = (level, 0, ..., 0)
  Rational ratio;
};

struct RefutationReport {
  int n = 0;
  MultiIndex nu;
  Rational target;  // C^2
  std::vector<RefutationStep> steps;
  /// First step with ratio > C^2, or -1.
  int first = -1;
  bool inconclusive = true;
  bool increasing = true;
};

/// Walks the ladder of |nu'| values and stops at the first ratio above C^2.
/// Throws DomainError for a ladder that is not strictly increasing or a nonpositive C.
RefutationReport refutation_scan(int n, const MultiIndex& nu, const std::vector<int>& ladder, const Rational& C);

struct ConjugationReport {
  /// ||F(Ag) - A^ F(g)||_2 on the frequency grid, F(g)(zeta) = int g(z) exp(-i zeta.z) dz.
  double residual = 0.0;
  /// residual / ||F(g)||_2 (0 for g = 0).
  double relative = 0.0;
  /// ||A^(g(2 .)) - (Ag)(2 .)||_2 / ||(Ag)(2 .)||_2 with the right side computed on the doubled grid.
  double rescaling = 0.0;
};

/// A^ = |zeta|^2 - Delta_zeta / 4 + i sum_j (beta_j d/d alpha_j - alpha_j d/d beta_j).
GridFunction apply_A_hat(const GridFunction& f);

/// Discrete transform of g onto the grid of spacing 2 pi / (N h) centered at 0.
GridFunction fourier_transform(const GridFunction& g);

/// [-20, 20]^2 with 321 points: the frequency spacing pi / 20 resolves the transforms of the
/// n = 1 coefficients up to |nu| + |nu'| = 8 for the finite-difference A^.
Grid conjugation_grid();

/// Checks the Fourier conjugation of A for c * Phi_{nu,nu'}^1 on `grid` (odd point counts).
ConjugationReport fourier_conjugation_check(const MultiIndex& nu, const MultiIndex& nup, const Grid& grid,
                                            std::complex<double> c = 1.0);

}  // namespace htlab
