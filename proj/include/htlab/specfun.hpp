#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace htlab {

/// Multi-index nu in N^n.
using MultiIndex = std::vector<int>;

int length(const MultiIndex& nu);
/// [k] = 2k + n.
inline int bracket(int k, int n) { return 2 * k + n; }
/// Binomial coefficient C(k + n - 1, k) as a double.
double multiplicity(int k, int n);

/// Largest Hermite index accepted by the recurrences.
inline constexpr int kHermiteBudget = 200;

/// L2-normalized Hermite function h_l(t) by the three-term recurrence.
double hermite_1d(int l, double t);
/// h_0(t), ..., h_lmax(t) into out[0..lmax].
void hermite_all(int lmax, double t, double* out);

/// Phi_nu^lambda(xi) = lambda^{n/4} prod_j h_{nu_j}(lambda^{1/2} xi_j).
double hermite_tensor(const MultiIndex& nu, double lambda, std::span<const double> xi);

/// L_k^alpha(x) by the three-term recurrence.
double laguerre_poly(int k, double alpha, double x);
/// L_0^alpha(x), ..., L_kmax^alpha(x) into out[0..kmax].
void laguerre_all(int kmax, double alpha, double x, double* out);

/// phi_k^lambda(z) = lambda^n L_k^{n-1}(lambda |z|^2 / 2) exp(-lambda |z|^2 / 4), z in R^{2n}.
double laguerre_fn(int k, double lambda, std::span<const double> z);
/// Same as a function of r = |z|.
double laguerre_fn_radial(int k, double lambda, int n, double r);
/// ||phi_k^lambda||_2^2 = (2 pi)^n lambda^n C(k+n-1, k).
double laguerre_fn_norm_sq(int k, double lambda, int n);

/// One-dimensional pair integral at lambda = 1:
///   M(a, b) = int exp(-i a eta) h_nu(eta + b/2) h_nu'(eta - b/2) d eta,
/// by composite Gauss-Legendre with panel doubling. `err` receives the
/// last doubling difference. Throws AccuracyError above 1e-9.
std::complex<double> pair_integral(int nu, int nup, double a, double b, double* err = nullptr);

/// Matrix coefficient Phi_{nu,nu'}^lambda(z), z = (a_1..a_n, b_1..b_n): the
/// product over j of the n = 1 coefficients
///   (lambda / 2 pi)^{1/2} M_{nu_j nu'_j}(lambda^{1/2} a_j, lambda^{1/2} b_j).
std::complex<double> matrix_coefficient(const MultiIndex& nu, const MultiIndex& nup, double lambda,
                                        std::span<const double> z);

/// The n = 1 coefficient Phi_{nu,nu'}^lambda(a, b) sampled on a tensor grid:
/// result(i, j) at (a[i], b[j]). Uniform a-axes use a phase recurrence.
Eigen::MatrixXcd pair_coefficient_table(int nu, int nup, double lambda, std::span<const double> a,
                                        std::span<const double> b);

}  // namespace htlab
