#pragma once

#include <Eigen/Dense>
#include <functional>

#include "htlab/grid.hpp"
#include "htlab/group.hpp"
#include "htlab/specfun.hpp"

namespace htlab {

/// Constant c_n of the spectral projector Lambda_k^lambda g = c_n (phi_k^lambda x_lambda g):
/// (2 pi)^{-n}, independent of lambda.
double projector_constant(int n);

/// Phi_{nu,nu'}^lambda sampled on a grid over R^{2n}; axes (a_1..a_n, b_1..b_n).
GridFunction sample_matrix_coefficient(const MultiIndex& nu, const MultiIndex& nup, double lambda,
                                       const Grid& grid);
/// phi_k^lambda sampled on a grid over R^{2n}.
GridFunction sample_laguerre(int k, double lambda, const Grid& grid);

/// Kernel-form operator on a closed uniform grid over R^{d1}:
///   out(x) = c sum_y g(y) K(x - y) exp((i/2) x^T J y) dV,
/// where `diff` holds K on the difference grid (2 N_i - 1 points per axis,
/// centered). Parallel over output points.
GridFunction kernel_apply(const GridFunction& g, const std::vector<cplx>& diff, const Eigen::MatrixXd& J,
                          double c);
/// Radial profile K(|z|) sampled on the difference grid of `grid`.
std::vector<cplx> radial_difference_table(const Grid& grid, const std::function<cplx(double)>& K);

/// f x_lambda g (z) = int f(z - w) g(w) exp((i/2) lambda omega(z, w)) dw, trapezoidal;
/// lambda >= 0 (lambda = 0 is ordinary convolution). Needs an odd symmetric grid.
GridFunction twisted_convolution(const GridFunction& f, const GridFunction& g, double lambda);

/// Finite-difference stencil order used by default (2, 4, 6 or 8).
inline constexpr int kDefaultFdOrder = 8;

/// L0^lambda = -Delta + lambda^2 |z|^2 / 4 - i lambda sum_j (a_j d/db_j - b_j d/da_j).
GridFunction apply_L0(double lambda, const GridFunction& f, int order = kDefaultFdOrder);
/// H^lambda = -Delta + lambda^2 |z|^2 / 4.
GridFunction apply_H(double lambda, const GridFunction& f, int order = kDefaultFdOrder);

/// -lap Delta f + pot |z|^2 f + rot sum_j (a_j d/db_j - b_j d/da_j) f by finite differences.
GridFunction apply_quadratic(const GridFunction& f, double lap, double pot, cplx rot, int order = kDefaultFdOrder);

/// Central-difference partial derivatives along every axis (zero beyond the grid).
std::vector<GridFunction> gradient(const GridFunction& f, int order = kDefaultFdOrder);

/// Default grid over R^{2n} for eigenfunction checks: n = 1 is [-12, 12]^2 with 257
/// points per axis, n = 2 is [-10, 10]^4 with 41.
Grid desk_grid(int n);

/// Orthogonal projection onto the [k] lambda eigenspace of L0^lambda.
GridFunction project_lambda(int k, double lambda, const GridFunction& g);

/// Projection onto the [k]|mu| eigenspace of L^mu, kernel form:
///   Pi g(x) = c int g(y) phi_k^{|mu|}(x - y) exp((i/2) omega_mu(x, y)) dy.
GridFunction project_pi(int k, const Eigen::VectorXd& mu, const GridFunction& g, const HTypeGroup& G);

/// Same projection by rotation: (Lambda_k^{|mu|}(g o T)) o T^{-1}, with g a callable
/// on g1, the output on `out`, and the w-integral of Lambda by trapezoid on `quad`.
/// T defaults to rotation(G, mu); any orthogonal T with T^T J_mubar T = J_std is accepted.
GridFunction project_pi_rotated(int k, const Eigen::VectorXd& mu,
                                const std::function<cplx(const double*)>& g, const HTypeGroup& G,
                                const Grid& out, const Grid& quad, const Eigen::MatrixXd* T = nullptr);

enum class Operator { L0, H };

/// Re (op f, f) / (f, f); throws DomainError for the zero function.
double rayleigh_quotient(Operator op, double lambda, const GridFunction& f, int order = kDefaultFdOrder);

}  // namespace htlab
