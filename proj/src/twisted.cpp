#include "htlab/twisted.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <numbers>

#include "htlab/errors.hpp"

namespace htlab {

double projector_constant(int n) { return std::pow(2.0 * std::numbers::pi, -n); }

namespace {

void require_closed_uniform(const Grid& g) {
  for (const Axis& a : g.axes())
    if (a.periodic) throw GridMismatch("operation needs closed (non-periodic) axes");
}

int half_dim(const Grid& g) {
  if (g.dims() % 2 != 0) throw StructuralError("grid over R^{2n} needs an even number of axes");
  return g.dims() / 2;
}

}  // namespace

GridFunction sample_matrix_coefficient(const MultiIndex& nu, const MultiIndex& nup, double lambda,
                                       const Grid& grid) {
  const int n = half_dim(grid);
  if (static_cast<int>(nu.size()) != n || static_cast<int>(nup.size()) != n)
    throw StructuralError("multi-index length does not match grid");
  std::vector<Eigen::MatrixXcd> tables;
  for (int j = 0; j < n; ++j) {
    const Axis& A = grid.axis(j);
    const Axis& B = grid.axis(n + j);
    std::vector<double> a(A.count), b(B.count);
    for (std::size_t i = 0; i < A.count; ++i) a[i] = A.coord(i);
    for (std::size_t i = 0; i < B.count; ++i) b[i] = B.coord(i);
    tables.push_back(pair_coefficient_table(nu[j], nup[j], lambda, a, b));
  }
  GridFunction out(grid);
  std::vector<std::size_t> idx(grid.dims());
  for (std::size_t f = 0; f < grid.size(); ++f) {
    grid.unravel(f, idx.data());
    cplx v = 1.0;
    for (int j = 0; j < n; ++j) v *= tables[j](idx[j], idx[n + j]);
    out.v[f] = v;
  }
  return out;
}

GridFunction sample_laguerre(int k, double lambda, const Grid& grid) {
  const int n = half_dim(grid);
  return GridFunction::sample(grid, [&](const double* z) {
    double r2 = 0.0;
    for (int i = 0; i < grid.dims(); ++i) r2 += z[i] * z[i];
    return cplx(laguerre_fn_radial(k, lambda, n, std::sqrt(r2)), 0.0);
  });
}

std::vector<cplx> radial_difference_table(const Grid& grid, const std::function<cplx(double)>& K) {
  require_closed_uniform(grid);
  const int d = grid.dims();
  std::vector<std::size_t> ext(d), str(d);
  std::size_t total = 1;
  for (int i = d - 1; i >= 0; --i) {
    ext[i] = 2 * grid.axis(i).count - 1;
    str[i] = total;
    total *= ext[i];
  }
  std::vector<cplx> t(total);
  for (std::size_t f = 0; f < total; ++f) {
    double r2 = 0.0;
    std::size_t rem = f;
    for (int i = 0; i < d; ++i) {
      const std::size_t k = rem / str[i];
      rem -= k * str[i];
      const double c = (static_cast<double>(k) - static_cast<double>(grid.axis(i).count - 1)) * grid.axis(i).spacing();
      r2 += c * c;
    }
    t[f] = K(std::sqrt(r2));
  }
  return t;
}

namespace {

GridFunction kernel_apply_2d(const GridFunction& g, const std::vector<cplx>& diff, double s, double c) {
  const Grid& grid = g.grid;
  const std::size_t N0 = grid.axis(0).count, N1 = grid.axis(1).count;
  const std::size_t W1 = 2 * N1 - 1;
  std::vector<double> x0(N0), x1(N1);
  for (std::size_t i = 0; i < N0; ++i) x0[i] = grid.axis(0).coord(i);
  for (std::size_t i = 0; i < N1; ++i) x1[i] = grid.axis(1).coord(i);
  // phase exp((i/2) s (x0 y1 - x1 y0))
  std::vector<cplx> E01(N0 * N1), E10(N1 * N0);
  for (std::size_t i = 0; i < N0; ++i)
    for (std::size_t j = 0; j < N1; ++j) E01[i * N1 + j] = std::polar(1.0, 0.5 * s * x0[i] * x1[j]);
  for (std::size_t i = 0; i < N1; ++i)
    for (std::size_t j = 0; j < N0; ++j) E10[i * N0 + j] = std::polar(1.0, -0.5 * s * x1[i] * x0[j]);

  bool real_kernel = true;
  for (const cplx& v : diff)
    if (v.imag() != 0.0) {
      real_kernel = false;
      break;
    }
  std::vector<bool> row_nonzero(N0, false);
  for (std::size_t j0 = 0; j0 < N0; ++j0)
    for (std::size_t j1 = 0; j1 < N1 && !row_nonzero[j0]; ++j1)
      if (g.v[j0 * N1 + j1] != cplx(0.0)) row_nonzero[j0] = true;

  GridFunction out(grid);
  const double scale = c * grid.cell_volume();
#pragma omp parallel
  {
    std::vector<double> rr(N1), ri(N1), kr(W1), ki(W1);
    std::vector<cplx> acc(N1);
#pragma omp for schedule(static)
    for (std::size_t i0 = 0; i0 < N0; ++i0) {
      std::fill(acc.begin(), acc.end(), cplx(0.0));
      for (std::size_t j0 = 0; j0 < N0; ++j0) {
        if (!row_nonzero[j0]) continue;
        const cplx* grow = &g.v[j0 * N1];
        const cplx* e = &E01[i0 * N1];
        for (std::size_t j1 = 0; j1 < N1; ++j1) {
          const cplx p = grow[j1] * e[j1];
          rr[j1] = p.real();
          ri[j1] = p.imag();
        }
        const cplx* krow = &diff[(i0 + N0 - 1 - j0) * W1];
        // reversed row: kr[p] = K(offset W1 - 1 - p)
        for (std::size_t p = 0; p < W1; ++p) {
          kr[p] = krow[W1 - 1 - p].real();
          ki[p] = krow[W1 - 1 - p].imag();
        }
        for (std::size_t i1 = 0; i1 < N1; ++i1) {
          const double* kp = &kr[N1 - 1 - i1];
          double tr = 0.0, ti = 0.0;
          if (real_kernel) {
            for (std::size_t j1 = 0; j1 < N1; ++j1) {
              tr += rr[j1] * kp[j1];
              ti += ri[j1] * kp[j1];
            }
          } else {
            const double* kq = &ki[N1 - 1 - i1];
            for (std::size_t j1 = 0; j1 < N1; ++j1) {
              tr += rr[j1] * kp[j1] - ri[j1] * kq[j1];
              ti += rr[j1] * kq[j1] + ri[j1] * kp[j1];
            }
          }
          acc[i1] += E10[i1 * N0 + j0] * cplx(tr, ti);
        }
      }
      for (std::size_t i1 = 0; i1 < N1; ++i1) out.v[i0 * N1 + i1] = scale * acc[i1];
    }
  }
  return out;
}

GridFunction kernel_apply_generic(const GridFunction& g, const std::vector<cplx>& diff, const Eigen::MatrixXd& J,
                                  double c) {
  const Grid& grid = g.grid;
  const int d = grid.dims();
  std::vector<std::size_t> dstr(d);
  std::size_t total = 1;
  for (int i = d - 1; i >= 0; --i) {
    dstr[i] = total;
    total *= 2 * grid.axis(i).count - 1;
  }
  GridFunction out(grid);
  const double scale = c * grid.cell_volume();
  const long long size = static_cast<long long>(grid.size());
#pragma omp parallel
  {
    std::vector<double> x(d), y(d);
    std::vector<std::size_t> ix(d), iy(d);
    std::vector<std::vector<cplx>> P(d);
#pragma omp for schedule(static)
    for (long long fx = 0; fx < size; ++fx) {
      grid.unravel(static_cast<std::size_t>(fx), ix.data());
      grid.coords(static_cast<std::size_t>(fx), x.data());
      Eigen::Map<const Eigen::VectorXd> xv(x.data(), d);
      const Eigen::VectorXd v = J.transpose() * xv;
      for (int q = 0; q < d; ++q) {
        P[q].resize(grid.axis(q).count);
        for (std::size_t j = 0; j < grid.axis(q).count; ++j)
          P[q][j] = std::polar(1.0, 0.5 * v[q] * grid.axis(q).coord(j));
      }
      cplx acc = 0.0;
      for (std::size_t fy = 0; fy < grid.size(); ++fy) {
        const cplx gv = g.v[fy];
        if (gv == cplx(0.0)) continue;
        grid.unravel(fy, iy.data());
        std::size_t off = 0;
        cplx ph = 1.0;
        for (int q = 0; q < d; ++q) {
          off += (ix[q] + grid.axis(q).count - 1 - iy[q]) * dstr[q];
          ph *= P[q][iy[q]];
        }
        acc += gv * diff[off] * ph;
      }
      out.v[fx] = scale * acc;
    }
  }
  return out;
}

}  // namespace

GridFunction kernel_apply(const GridFunction& g, const std::vector<cplx>& diff, const Eigen::MatrixXd& J, double c) {
  const Grid& grid = g.grid;
  require_closed_uniform(grid);
  const int d = grid.dims();
  if (J.rows() != d || J.cols() != d) throw StructuralError("kernel_apply: J has wrong size");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= 2 * grid.axis(i).count - 1;
  if (diff.size() != total) throw StructuralError("kernel_apply: difference table has wrong size");
  if (d == 2 && J(0, 0) == 0.0 && J(1, 1) == 0.0 && J(0, 1) == -J(1, 0)) return kernel_apply_2d(g, diff, J(0, 1), c);
  return kernel_apply_generic(g, diff, J, c);
}

GridFunction twisted_convolution(const GridFunction& f, const GridFunction& g, double lambda) {
  require_same_grid(f, g);
  const Grid& grid = f.grid;
  require_closed_uniform(grid);
  const int n = half_dim(grid);
  if (lambda < 0) throw DomainError("twisted_convolution: lambda must be nonnegative");
  const int d = grid.dims();
  for (int i = 0; i < d; ++i) {
    const Axis& a = grid.axis(i);
    if (a.count % 2 == 0 || std::abs(a.lo + a.hi) > 1e-12 * (a.hi - a.lo))
      throw GridMismatch("twisted_convolution needs odd symmetric axes");
  }
  std::vector<std::size_t> dstr(d);
  std::size_t total = 1;
  for (int i = d - 1; i >= 0; --i) {
    dstr[i] = total;
    total *= 2 * grid.axis(i).count - 1;
  }
  std::vector<cplx> table(total, 0.0);
  std::vector<std::size_t> idx(d);
  for (std::size_t fi = 0; fi < grid.size(); ++fi) {
    grid.unravel(fi, idx.data());
    std::size_t off = 0;
    for (int i = 0; i < d; ++i) off += (idx[i] + (grid.axis(i).count - 1) / 2) * dstr[i];
    table[off] = f.v[fi];
  }
  return kernel_apply(g, table, lambda * standard_symplectic(n), 1.0);
}

namespace {

struct Stencil {
  double c0;
  std::array<double, 4> d2;
  std::array<double, 4> d1;
  int m;
};

Stencil stencil(int order) {
  switch (order) {
    case 2: return {-2.0, {1.0, 0, 0, 0}, {0.5, 0, 0, 0}, 1};
    case 4: return {-2.5, {4.0 / 3, -1.0 / 12, 0, 0}, {2.0 / 3, -1.0 / 12, 0, 0}, 2};
    case 6: return {-49.0 / 18, {1.5, -3.0 / 20, 1.0 / 90, 0}, {0.75, -3.0 / 20, 1.0 / 60, 0}, 3};
    case 8:
      return {-205.0 / 72, {1.6, -0.2, 8.0 / 315, -1.0 / 560}, {0.8, -0.2, 4.0 / 105, -1.0 / 280}, 4};
    default: throw DomainError("finite-difference order must be 2, 4, 6 or 8");
  }
}

// Second and first derivatives along one axis; values beyond the grid are zero.
void axis_derivatives(const GridFunction& f, int axis, const Stencil& st, std::vector<cplx>& d2,
                      std::vector<cplx>& d1) {
  const Grid& g = f.grid;
  const std::size_t N = g.axis(axis).count, S = g.stride(axis);
  const double h = g.axis(axis).spacing();
  d2.assign(g.size(), 0.0);
  d1.assign(g.size(), 0.0);
  const long long size = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
  for (long long fl = 0; fl < size; ++fl) {
    const std::size_t f0 = static_cast<std::size_t>(fl);
    const std::size_t k = f0 / S % N;
    cplx a2 = st.c0 * f.v[f0], a1 = 0.0;
    for (int m = 1; m <= st.m; ++m) {
      const cplx up = k + m < N ? f.v[f0 + m * S] : cplx(0.0);
      const cplx dn = k >= static_cast<std::size_t>(m) ? f.v[f0 - m * S] : cplx(0.0);
      a2 += st.d2[m - 1] * (up + dn);
      a1 += st.d1[m - 1] * (up - dn);
    }
    d2[f0] = a2 / (h * h);
    d1[f0] = a1 / h;
  }
}

}  // namespace

GridFunction apply_quadratic(const GridFunction& f, double lap, double pot, cplx rot, int order) {
  const Grid& g = f.grid;
  require_closed_uniform(g);
  const int n = half_dim(g);
  const Stencil st = stencil(order);
  const int d = g.dims();
  std::vector<std::vector<cplx>> D1(d);
  std::vector<cplx> lapv(g.size(), 0.0), d2;
  for (int a = 0; a < d; ++a) {
    axis_derivatives(f, a, st, d2, D1[a]);
    for (std::size_t i = 0; i < g.size(); ++i) lapv[i] += d2[i];
  }
  GridFunction out(g);
  std::vector<double> z(d);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, z.data());
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    cplx v = -lap * lapv[i] + pot * r2 * f.v[i];
    if (rot != 0.0) {
      cplx N = 0.0;
      for (int j = 0; j < n; ++j) N += z[j] * D1[n + j][i] - z[n + j] * D1[j][i];
      v += rot * N;
    }
    out.v[i] = v;
  }
  out.flags = f.flags;
  return out;
}

std::vector<GridFunction> gradient(const GridFunction& f, int order) {
  require_closed_uniform(f.grid);
  const Stencil st = stencil(order);
  std::vector<GridFunction> out;
  std::vector<cplx> d2;
  for (int a = 0; a < f.grid.dims(); ++a) {
    GridFunction da(f.grid);
    axis_derivatives(f, a, st, d2, da.v);
    out.push_back(std::move(da));
  }
  return out;
}

Grid desk_grid(int n) {
  switch (n) {
    case 1: return Grid::symmetric(2, 12.0, 257);
    case 2: return Grid::symmetric(4, 10.0, 41);
    default: throw DomainError("desk_grid: n must be 1 or 2");
  }
}

namespace {

GridFunction apply_operator(double lambda, const GridFunction& f, int order, bool rotation_term) {
  if (!(lambda > 0)) throw DomainError("operator needs lambda > 0");
  GridFunction out = apply_quadratic(f, 1.0, 0.25 * lambda * lambda, rotation_term ? cplx(0.0, -lambda) : 0.0, order);
  const Grid& g = f.grid;
  double hmax = 0.0, Tmax = 0.0;
  for (int a = 0; a < g.dims(); ++a) {
    hmax = std::max(hmax, g.axis(a).spacing());
    Tmax = std::max({Tmax, std::abs(g.axis(a).lo), std::abs(g.axis(a).hi)});
  }
  if (hmax * hmax * lambda * lambda * Tmax * Tmax > 1.0) out.flags |= kFlagCoarseGrid;
  return out;
}

}  // namespace

GridFunction apply_L0(double lambda, const GridFunction& f, int order) {
  return apply_operator(lambda, f, order, true);
}

GridFunction apply_H(double lambda, const GridFunction& f, int order) {
  return apply_operator(lambda, f, order, false);
}

GridFunction project_lambda(int k, double lambda, const GridFunction& g) {
  if (!(lambda > 0)) throw DomainError("project_lambda: lambda must be positive");
  if (k < 0) throw DomainError("project_lambda: k must be nonnegative");
  const int n = half_dim(g.grid);
  const auto table =
      radial_difference_table(g.grid, [&](double r) { return cplx(laguerre_fn_radial(k, lambda, n, r), 0.0); });
  return kernel_apply(g, table, lambda * standard_symplectic(n), projector_constant(n));
}

GridFunction project_pi(int k, const Eigen::VectorXd& mu, const GridFunction& g, const HTypeGroup& G) {
  if (k < 0) throw DomainError("project_pi: k must be nonnegative");
  const Eigen::MatrixXd J = j_map(G, mu);
  if (g.grid.dims() != G.d1()) throw GridMismatch("project_pi: grid dimension differs from d1");
  const double rho = mu.norm();
  const int n = G.n();
  const auto table =
      radial_difference_table(g.grid, [&](double r) { return cplx(laguerre_fn_radial(k, rho, n, r), 0.0); });
  return kernel_apply(g, table, J, projector_constant(n));
}

GridFunction project_pi_rotated(int k, const Eigen::VectorXd& mu, const std::function<cplx(const double*)>& g,
                                const HTypeGroup& G, const Grid& out, const Grid& quad, const Eigen::MatrixXd* T) {
  if (k < 0) throw DomainError("project_pi_rotated: k must be nonnegative");
  const Eigen::MatrixXd Tm = T ? *T : rotation(G, mu);
  const int d = G.d1(), n = G.n();
  if (out.dims() != d || quad.dims() != d) throw GridMismatch("project_pi_rotated: grid dimension differs from d1");
  const double rho = mu.norm();
  const double c = projector_constant(n);
  const std::size_t Q = quad.size();
  std::vector<double> wq(Q * d);
  std::vector<double> phiq(Q);
  for (std::size_t q = 0; q < Q; ++q) {
    quad.coords(q, &wq[q * d]);
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += wq[q * d + i] * wq[q * d + i];
    phiq[q] = laguerre_fn_radial(k, rho, n, std::sqrt(r2));
  }
  GridFunction res(out);
  const double dv = quad.cell_volume();
  const long long size = static_cast<long long>(out.size());
#pragma omp parallel
  {
    std::vector<double> x(d), arg(d);
    Eigen::VectorXd zt(d), y(d);
#pragma omp for schedule(static)
    for (long long fx = 0; fx < size; ++fx) {
      out.coords(static_cast<std::size_t>(fx), x.data());
      const Eigen::VectorXd z = Tm.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), d);
      cplx acc = 0.0;
      for (std::size_t q = 0; q < Q; ++q) {
        if (phiq[q] == 0.0) continue;
        const double* w = &wq[q * d];
        for (int i = 0; i < d; ++i) zt[i] = z[i] - w[i];
        y.noalias() = Tm * zt;
        for (int i = 0; i < d; ++i) arg[i] = y[i];
        double om = 0.0;  // omega(z, w) = sum_j a_j(z) b_j(w) - b_j(z) a_j(w)
        for (int j = 0; j < n; ++j) om += z[j] * w[n + j] - z[n + j] * w[j];
        acc += g(arg.data()) * phiq[q] * std::polar(1.0, -0.5 * rho * om);
      }
      res.v[fx] = c * dv * acc;
    }
  }
  return res;
}

double rayleigh_quotient(Operator op, double lambda, const GridFunction& f, int order) {
  const double nf = norm(f);
  if (nf == 0.0) throw DomainError("rayleigh_quotient: zero function");
  const GridFunction Af = op == Operator::L0 ? apply_L0(lambda, f, order) : apply_H(lambda, f, order);
  return inner(f, Af).real() / (nf * nf);
}

}  // namespace htlab
