#include "htlab/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "htlab/errors.hpp"
#include "htlab/parallel.hpp"
#include "htlab/quadrature.hpp"
#include "htlab/specfun.hpp"
#include "htlab/twisted.hpp"

namespace htlab {

namespace {

// Collapsed sphere rule for int_{S^{m-1}} e^{i s w_m}: only the last coordinate matters.
struct SphereFactor {
  int m = 1;
  std::vector<double> t, w;

  double operator()(double s) const {
    if (m == 1) return 2.0 * std::cos(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += w[i] * std::cos(s * t[i]);
    return acc;
  }
};

SphereFactor collapsed_rule(int m, int level) {
  SphereFactor f;
  f.m = m;
  if (m == 1) return f;
  const SphereRule r = sphere_rule(m, level);
  std::map<double, double> acc;
  for (std::size_t i = 0; i < r.size(); ++i) acc[r.point(i)[m - 1]] += r.w[i];
  for (const auto& [t, w] : acc) {
    f.t.push_back(t);
    f.w.push_back(w);
  }
  return f;
}

// Smallest level whose collapsed rule is stable to 1e-8 (relative to the sphere area) up to s_max.
SphereFactor adaptive_sphere(int m, double s_max) {
  if (m == 1) return collapsed_rule(1, 0);
  const double area = sphere_area(m);
  SphereFactor prev = collapsed_rule(m, 0);
  for (int level = 1; level <= 10; ++level) {
    SphereFactor cur = collapsed_rule(m, level);
    double diff = 0.0;
    for (int i = 0; i <= 32; ++i) {
      const double s = s_max * i / 32.0;
      diff = std::max(diff, std::abs(cur(s) - prev(s)));
    }
    if (diff < 1e-8 * area) return prev;
    prev = std::move(cur);
  }
  throw AccuracyError("sphere rule did not converge for the central oscillation", s_max);
}

double kernel_prefactor(int n, int d2) { return projector_constant(n) * std::pow(2 * M_PI, -d2); }

// k-range [kmin, kmax] of branches with [k] rho in [lo, hi] and [k] in [blo, bhi].
bool branch_range(double rho, int n, double lo, double hi, double blo, double bhi, int* kmin, int* kmax) {
  const double b_lo = std::max(lo / rho, blo), b_hi = std::min(hi / rho, bhi);
  if (!(b_lo <= b_hi)) return false;
  *kmin = std::max(0, static_cast<int>(std::ceil((b_lo - n) / 2.0 - 1e-12)));
  const double kh = std::floor((b_hi - n) / 2.0 + 1e-12);
  if (kh < 0) return false;
  *kmax = static_cast<int>(std::min(kh, 1e7));
  return *kmin <= *kmax;
}

// Radial profile sum_k a_k phi_k^rho(r) for k = kmin..kmax.
std::complex<double> laguerre_combination(const std::vector<std::complex<double>>& a, int kmin, double rho, int n,
                                          double r, std::vector<double>& buf) {
  const int kmax = kmin + static_cast<int>(a.size()) - 1;
  buf.resize(kmax + 1);
  const double t = 0.5 * rho * r * r;
  laguerre_all(kmax, n - 1, t, buf.data());
  const double pre = std::pow(rho, n) * std::exp(-0.5 * t);
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * buf[kmin + i];
  return pre * s;
}

}  // namespace

std::size_t KernelTable::term_count() const {
  std::size_t c = 0;
  for (const auto& t : record) c += t.rho.size();
  return c;
}

std::complex<double> KernelTable::evaluate_radial(double r, double s) const {
  std::complex<double> acc = 0.0;
  if (d2 == 1) {
    for (const auto& t : record)
      for (std::size_t q = 0; q < t.rho.size(); ++q)
        acc += t.w[q] * t.coef[q] * laguerre_fn_radial(t.k, t.rho[q], n, r) * (2.0 * std::cos(t.rho[q] * s));
  } else {
    double rmax = 0.0;
    for (const auto& t : record)
      for (double rho : t.rho) rmax = std::max(rmax, rho);
    const SphereFactor Sf = adaptive_sphere(d2, rmax * s);
    for (const auto& t : record)
      for (std::size_t q = 0; q < t.rho.size(); ++q)
        acc += t.w[q] * t.coef[q] * laguerre_fn_radial(t.k, t.rho[q], n, r) * Sf(t.rho[q] * s);
  }
  return prefactor * acc;
}

std::complex<double> KernelTable::evaluate(const double* x, const double* u) const {
  double r2 = 0.0, s2 = 0.0;
  for (int i = 0; i < 2 * n; ++i) r2 += x[i] * x[i];
  for (int i = 0; i < d2; ++i) s2 += u[i] * u[i];
  return evaluate_radial(std::sqrt(r2), std::sqrt(s2));
}

double KernelTable::spectral_norm_sq() const {
  std::vector<double> parts;
  for (const auto& t : record)
    for (std::size_t q = 0; q < t.rho.size(); ++q)
      parts.push_back(t.w[q] * std::norm(t.coef[q]) * laguerre_fn_norm_sq(t.k, t.rho[q], n));
  const double c = projector_constant(n);
  return c * c * std::pow(2 * M_PI, -d2) * sphere_area(d2) * pairwise_sum(std::span<const double>(parts));
}

double KernelTable::grid_norm_sq() const {
  if (!has_samples()) throw DomainError("kernel table has no spatial samples");
  std::vector<double> t(samples.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(samples[i]);
  return pairwise_sum(std::span<const double>(t)) * grid.cell_volume();
}

KernelTable synthesize_kernel(const JointMultiplier& M, const HTypeGroup& G, const Grid* grid, const KernelOptions& opt) {
  KernelTable K;
  K.n = G.n();
  K.d2 = G.d2();
  K.prefactor = kernel_prefactor(K.n, K.d2);
  K.mu_min = opt.mu_min;
  const int n = K.n, d1 = G.d1(), d2 = K.d2;
  if (grid) {
    if (grid->dims() != d1 + d2 || grid->split() != d1) throw GridMismatch("kernel grid must cover g1 x g2");
    K.grid = *grid;
  }
  if (M.is_zero()) {
    if (grid) K.samples.assign(grid->size(), 0.0);
    return K;
  }
  if (!std::isfinite(M.lambda_hi())) throw DomainError("synthesize_kernel: unbounded spectral support");
  const bool truncated = std::isfinite(M.bracket_hi());
  if (!truncated && !(opt.mu_min > 0)) throw DomainError("synthesize_kernel: unbounded k-range without mu_min");

  double x_max = opt.x_max, u_max = opt.u_max;
  if (grid) {
    for (int i = 0; i < d1; ++i) x_max = std::max(x_max, std::max(std::abs(grid->axis(i).lo), std::abs(grid->axis(i).hi)));
    double s2 = 0.0;
    for (int i = d1; i < d1 + d2; ++i) {
      const double a = std::max(std::abs(grid->axis(i).lo), std::abs(grid->axis(i).hi));
      s2 += a * a;
    }
    u_max = std::max(u_max, std::sqrt(s2));
    x_max *= std::sqrt(static_cast<double>(d1));
  }
  const double lam_lo = M.lambda_lo(), lam_hi = M.lambda_hi();
  const double mu_floor = std::max(opt.mu_min, 0.0);
  const double br_hi = truncated ? M.bracket_hi() : lam_hi / mu_floor;
  const double c = projector_constant(n);
  const double norm_pre = c * c * std::pow(2 * M_PI, -d2) * sphere_area(d2);
  double excluded = 0.0;
  for (int k = 0;; ++k) {
    const double br = bracket(k, n);
    if (br > br_hi) break;
    if (br < M.bracket_lo()) continue;
    // skip branches the truncation annihilates (its factor depends on k only)
    bool any = false;
    for (int i = 0; i <= 16 && !any; ++i) any = M.at_k(k, n, (lam_lo + (lam_hi - lam_lo) * i / 16.0) / br) != 0.0;
    if (!any) continue;
    const double a = std::max(lam_lo / br, mu_floor), b = lam_hi / br;
    if (lam_lo / br < mu_floor) {
      // part of this branch below mu_min, by Plancherel
      const Rule r = composite_legendre(lam_lo / br, std::min(mu_floor, b), 8, 16);
      for (std::size_t q = 0; q < r.size(); ++q)
        excluded += r.w[q] * std::pow(r.x[q], d2 - 1) * std::norm(M.at_k(k, n, r.x[q])) *
                    laguerre_fn_norm_sq(k, r.x[q], n);
    }
    if (!(a < b)) continue;
    const double W = b - a;
    const double osc = W * u_max / (2 * M_PI) + std::min(static_cast<double>(k + 1), W * x_max * x_max / 8.0);
    const int panels = std::max(1, opt.refine) * (4 + static_cast<int>(std::ceil(2.0 * osc)));
    const Rule r = composite_legendre(a, b, panels, 16);
    SpectralTerm t;
    t.k = k;
    for (std::size_t q = 0; q < r.size(); ++q) {
      const std::complex<double> v = M.at_k(k, n, r.x[q]);
      if (v == 0.0) continue;
      t.rho.push_back(r.x[q]);
      t.w.push_back(r.w[q] * std::pow(r.x[q], d2 - 1));
      t.coef.push_back(v);
    }
    if (!t.rho.empty()) K.record.push_back(std::move(t));
  }
  if (!truncated) {
    // Branches with [k] mu_min >= lam_hi are excluded entirely; each carries
    // (2 pi)^n C(k+n-1,k) [k]^{-(d2+n)} int lam^{d2+n-1} |M(lam)|^2 dlam.
    const Rule r = composite_legendre(lam_lo, lam_hi, 16, 16);
    double full = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) full += r.w[q] * std::pow(r.x[q], d2 + n - 1) * std::norm(M(r.x[q], 1.0));
    const int k0 = static_cast<int>(std::floor((br_hi - n) / 2.0)) + 1;
    const int k_end = k0 + 1000000;
    double tail = 0.0;
    for (int j = k_end - 1; j >= k0; --j) tail += multiplicity(j, n) * std::pow(bracket(j, n), -(d2 + n));
    // remainder ~ int_{k_end}^inf k^{n-1}/(n-1)! (2k)^{-(d2+n)} dk
    tail += std::pow(k_end, -d2) / (std::tgamma(n) * std::pow(2.0, d2 + n) * d2);
    excluded += std::pow(2 * M_PI, n) * full * tail;
  }
  K.excluded_norm_sq = norm_pre * excluded;

  if (grid) {
    // samples = A B with A(x, j) = phi_k^{rho_j}(|x|) and B(j, u) = W_j S(rho_j |u|)
    const std::size_t J = K.term_count();
    Grid xg(std::vector<Axis>(grid->axes().begin(), grid->axes().begin() + d1), d1);
    Grid ug(std::vector<Axis>(grid->axes().begin() + d1, grid->axes().end()), d2);
    Eigen::MatrixXd A(xg.size(), J);
    Eigen::MatrixXcd B(J, ug.size());
    double rho_max = 0.0;
    for (const auto& t : K.record)
      for (double rho : t.rho) rho_max = std::max(rho_max, rho);
    const SphereFactor S = adaptive_sphere(d2, rho_max * u_max);
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < static_cast<long long>(xg.size()); ++p) {
      std::vector<double> x(d1);
      xg.coords(static_cast<std::size_t>(p), x.data());
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      const double r = std::sqrt(r2);
      std::size_t j = 0;
      for (const auto& t : K.record)
        for (double rho : t.rho) A(p, j++) = laguerre_fn_radial(t.k, rho, n, r);
    }
    std::vector<double> u(d2);
    for (std::size_t p = 0; p < ug.size(); ++p) {
      ug.coords(p, u.data());
      double s2 = 0.0;
      for (double v : u) s2 += v * v;
      const double s = std::sqrt(s2);
      std::size_t j = 0;
      for (const auto& t : K.record)
        for (std::size_t q = 0; q < t.rho.size(); ++q, ++j) B(j, p) = K.prefactor * t.w[q] * t.coef[q] * S(t.rho[q] * s);
    }
    const Eigen::MatrixXcd C = A.cast<std::complex<double>>() * B;
    K.samples.resize(grid->size());
    for (std::size_t p = 0; p < xg.size(); ++p)
      for (std::size_t q = 0; q < ug.size(); ++q) K.samples[p * ug.size() + q] = C(p, q);
  }
  return K;
}

// ---------------------------------------------------------------- apply_multiplier

namespace {

struct CentralLayout {
  Grid xg;
  std::vector<int> ucount;
  std::vector<double> uperiod;
  std::size_t Nx = 0, Nu = 0;
};

CentralLayout layout_of(const Grid& g, const HTypeGroup& G) {
  const int d1 = G.d1(), d2 = G.d2();
  if (g.dims() != d1 + d2 || g.split() != d1) throw GridMismatch("apply_multiplier: grid must cover g1 x g2");
  CentralLayout L;
  for (int i = 0; i < d1; ++i) {
    const Axis& a = g.axis(i);
    if (a.periodic || a.count % 2 == 0 || std::abs(a.lo + a.hi) > 1e-12 * (a.hi - a.lo))
      throw GridMismatch("apply_multiplier: first-layer axes must be closed, odd and symmetric");
  }
  for (int i = d1; i < d1 + d2; ++i) {
    if (!g.axis(i).periodic) throw GridMismatch("apply_multiplier: central axes must be periodic");
    L.ucount.push_back(static_cast<int>(g.axis(i).count));
    L.uperiod.push_back(g.axis(i).hi - g.axis(i).lo);
  }
  L.xg = Grid(std::vector<Axis>(g.axes().begin(), g.axes().begin() + d1), d1);
  L.Nx = L.xg.size();
  L.Nu = g.size() / L.Nx;
  return L;
}

void fft_central(std::vector<std::complex<double>>& data, const CentralLayout& L, int sign) {
  fftw_plan plan;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_many_dft(static_cast<int>(L.ucount.size()), L.ucount.data(), static_cast<int>(L.Nx), p, nullptr, 1,
                              static_cast<int>(L.Nu), p, nullptr, 1, static_cast<int>(L.Nu), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

// Euclidean multiplier E(|xi|^2) on the x-grid with zero padding to twice the size.
GridFunction euclidean_apply(const std::function<std::complex<double>(double)>& E, const GridFunction& g) {
  const Grid& grid = g.grid;
  const int d = grid.dims();
  std::vector<int> dims(d);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    dims[i] = static_cast<int>(2 * grid.axis(i).count);
    total *= dims[i];
  }
  std::vector<std::complex<double>> buf(total, 0.0);
  std::vector<std::size_t> idx(d);
  auto padded_index = [&](const std::vector<std::size_t>& ix) {
    std::size_t f = 0;
    for (int i = 0; i < d; ++i) f = f * dims[i] + ix[i];
    return f;
  };
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.unravel(p, idx.data());
    buf[padded_index(idx)] = g.v[p];
  }
  auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fwd = fftw_plan_dft(d, dims.data(), ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft(d, dims.data(), ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  std::vector<std::size_t> m(d);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    double xi2 = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      m[i] = rem % dims[i];
      rem /= dims[i];
      const long long mm = m[i] < static_cast<std::size_t>(dims[i] / 2) ? static_cast<long long>(m[i])
                                                                        : static_cast<long long>(m[i]) - dims[i];
      const double xi = 2 * M_PI * mm / (dims[i] * grid.axis(i).spacing());
      xi2 += xi * xi;
    }
    buf[f] *= E(xi2) / static_cast<double>(total);
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  GridFunction out(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.unravel(p, idx.data());
    out.v[p] = buf[padded_index(idx)];
  }
  return out;
}

}  // namespace

GridFunction apply_multiplier(const JointMultiplier& M, const GridFunction& f, const HTypeGroup& G,
                              const ApplyOptions& opt, ApplyReport* report) {
  const CentralLayout L = layout_of(f.grid, G);
  const int n = G.n(), d2 = G.d2();
  ApplyReport rep;
  GridFunction out(f.grid);
  if (M.is_zero()) {
    if (report) *report = rep;
    return out;
  }
  const double lam_hi = std::isfinite(M.lambda_hi()) ? M.lambda_hi() : opt.lambda_max;
  if (!(lam_hi > 0)) throw DomainError("apply_multiplier: unbounded spectral support needs lambda_max");

  std::vector<std::complex<double>> buf = f.v;
  fft_central(buf, L, FFTW_FORWARD);

  const double c = projector_constant(n);
  std::vector<int> mi(d2);
  GridFunction slice(L.xg);
  for (std::size_t m = 0; m < L.Nu; ++m) {
    // signed central frequency of mode m
    std::size_t rem = m;
    Eigen::VectorXd mu(d2);
    for (int a = d2 - 1; a >= 0; --a) {
      const int N = L.ucount[a];
      const int i = static_cast<int>(rem % N);
      rem /= N;
      mu[a] = 2 * M_PI * (i < N / 2 ? i : i - N) / L.uperiod[a];
    }
    for (std::size_t p = 0; p < L.Nx; ++p) slice.v[p] = buf[p * L.Nu + m];
    const double rho = mu.norm();
    GridFunction res(L.xg);
    bool touched = false;
    if (rho == 0.0) {
      if (M.euclidean()) {
        res = euclidean_apply(M.euclidean(), slice);
        rep.euclidean_zero_mode = true;
        touched = true;
      }
    } else {
      int kmin = 0, kmax = -1;
      if (branch_range(rho, n, M.lambda_lo(), lam_hi, M.bracket_lo(), M.bracket_hi(), &kmin, &kmax)) {
        std::vector<std::complex<double>> a(kmax - kmin + 1);
        bool any = false;
        for (int k = kmin; k <= kmax; ++k) {
          a[k - kmin] = c * M.at_k(k, n, rho);
          any = any || a[k - kmin] != 0.0;
        }
        if (any) {
          std::vector<double> lbuf;
          const auto diff = radial_difference_table(
              L.xg, [&](double r) { return laguerre_combination(a, kmin, rho, n, r, lbuf); });
          res = kernel_apply(slice, diff, j_map(G, mu), 1.0);
          rep.max_k = std::max(rep.max_k, kmax);
          ++rep.modes;
          touched = true;
        }
      }
    }
    for (std::size_t p = 0; p < L.Nx; ++p) buf[p * L.Nu + m] = touched ? res.v[p] : 0.0;
  }

  fft_central(buf, L, FFTW_BACKWARD);
  for (std::size_t p = 0; p < buf.size(); ++p) out.v[p] = buf[p] / static_cast<double>(L.Nu);

  // energy in the outer quarter of the central box
  std::vector<double> all(out.v.size()), outer(out.v.size(), 0.0);
  for (std::size_t p = 0; p < out.v.size(); ++p) {
    all[p] = std::norm(out.v[p]);
    std::size_t rem = p % L.Nu;
    bool edge = false;
    for (int a = d2 - 1; a >= 0; --a) {
      const int N = L.ucount[a];
      const int i = static_cast<int>(rem % N);
      rem /= N;
      if (std::abs(i - N / 2.0) > 0.375 * N) edge = true;
    }
    if (edge) outer[p] = all[p];
  }
  const double tot = pairwise_sum(std::span<const double>(all));
  rep.wrap_fraction = tot > 0 ? pairwise_sum(std::span<const double>(outer)) / tot : 0.0;
  if (report) *report = rep;
  if (opt.check_wrap && rep.wrap_fraction > opt.wrap_tol)
    throw AccuracyError("apply_multiplier: central box too small (wrap-around energy)", rep.wrap_fraction);
  return out;
}

// ---------------------------------------------------------------- group convolution

std::vector<std::complex<double>> group_convolve(const GridFunction& f, const KernelTable& K, const HTypeGroup& G,
                                                 const std::vector<Point>& targets, int sphere_level) {
  const int d1 = G.d1(), d2 = G.d2(), n = G.n();
  if (K.n != n || K.d2 != d2) throw StructuralError("group_convolve: kernel belongs to another group");
  const Grid& g = f.grid;
  if (g.dims() != d1 + d2 || g.split() != d1) throw GridMismatch("group_convolve: grid must cover g1 x g2");
  const Grid xg(std::vector<Axis>(g.axes().begin(), g.axes().begin() + d1), d1);
  const Grid ug(std::vector<Axis>(g.axes().begin() + d1, g.axes().end()), d2);
  const std::size_t Nx = xg.size(), Nu = ug.size();
  const SphereRule dirs = sphere_rule(d2, sphere_level);

  // central frequencies mu_{j,s} = rho_j w_s with weights W_j a_s
  struct Node {
    int k;
    double rho;
    std::complex<double> weight;
    std::vector<double> mu;
  };
  std::vector<Node> nodes;
  for (const auto& t : K.record)
    for (std::size_t q = 0; q < t.rho.size(); ++q)
      for (std::size_t s = 0; s < dirs.size(); ++s) {
        Node nd{t.k, t.rho[q], t.w[q] * t.coef[q] * dirs.w[s], std::vector<double>(d2)};
        for (int a = 0; a < d2; ++a) nd.mu[a] = t.rho[q] * dirs.point(s)[a];
        nodes.push_back(std::move(nd));
      }
  const std::size_t Jn = nodes.size();
  const std::size_t nd_dirs = dirs.size();
  if (d2 > 3) throw DomainError("group_convolve: center dimension above 3");

  // fhat(y, mu) = int f(y, v) e^{-i mu.v} dv
  std::vector<double> ucoord(Nu * d2);
  for (std::size_t p = 0; p < Nu; ++p) ug.coords(p, &ucoord[p * d2]);
  const double dv = ug.cell_volume();
  std::vector<std::complex<double>> phase(Jn * Nu);
  for (std::size_t j = 0; j < Jn; ++j)
    for (std::size_t p = 0; p < Nu; ++p) {
      double ph = 0.0;
      for (int a = 0; a < d2; ++a) ph += nodes[j].mu[a] * ucoord[p * d2 + a];
      phase[j * Nu + p] = std::polar(dv, -ph);
    }
  std::vector<std::complex<double>> fhat(Nx * Jn, 0.0);
  std::vector<char> live(Nx, 0);
#pragma omp parallel for schedule(static)
  for (long long y = 0; y < static_cast<long long>(Nx); ++y) {
    const std::complex<double>* row = &f.v[y * Nu];
    bool nz = false;
    for (std::size_t p = 0; p < Nu && !nz; ++p) nz = row[p] != 0.0;
    if (!nz) continue;
    live[y] = 1;
    for (std::size_t j = 0; j < Jn; ++j) {
      const std::complex<double>* e = &phase[j * Nu];
      std::complex<double> acc = 0.0;
      for (std::size_t p = 0; p < Nu; ++p) acc += row[p] * e[p];
      fhat[y * Jn + j] = acc;
    }
  }
  std::vector<double> ycoord(Nx * d1);
  for (std::size_t p = 0; p < Nx; ++p) xg.coords(p, &ycoord[p * d1]);
  const double dx = xg.cell_volume();

  std::vector<std::complex<double>> out(targets.size());
#pragma omp parallel for schedule(dynamic)
  for (long long ti = 0; ti < static_cast<long long>(targets.size()); ++ti) {
    const Point& tg = targets[ti];
    if (tg.x.size() != d1 || tg.u.size() != d2) throw StructuralError("group_convolve: target dimension mismatch");
    std::vector<std::complex<double>> partial;
    partial.reserve(Nx);
    Eigen::VectorXd y(d1), br(d2);
    for (std::size_t p = 0; p < Nx; ++p) {
      if (!live[p]) continue;
      for (int i = 0; i < d1; ++i) y[i] = ycoord[p * d1 + i];
      for (int a = 0; a < d2; ++a) br[a] = y.dot(G.J(a) * tg.x);  // [y, x]_a
      const double r = (tg.x - y).norm();
      std::complex<double> acc = 0.0;
      double theta[3];
      for (int a = 0; a < d2; ++a) theta[a] = tg.u[a] - 0.5 * br[a];
      const std::complex<double>* fh = &fhat[p * Jn];
      for (std::size_t j = 0; j < Jn; j += nd_dirs) {
        // nodes j .. j + nd_dirs - 1 share k and rho
        const double phi = laguerre_fn_radial(nodes[j].k, nodes[j].rho, n, r);
        if (d2 == 1) {
          const double ph = nodes[j].mu[0] * theta[0];
          const double cs = std::cos(ph), sn = std::sin(ph);
          acc += phi * (nodes[j].weight * std::complex<double>(cs, sn) * fh[j] +
                        nodes[j + 1].weight * std::complex<double>(cs, -sn) * fh[j + 1]);
        } else {
          std::complex<double> inner = 0.0;
          for (std::size_t s = j; s < j + nd_dirs; ++s) {
            double ph = 0.0;
            for (int a = 0; a < d2; ++a) ph += nodes[s].mu[a] * theta[a];
            inner += nodes[s].weight * std::polar(1.0, ph) * fh[s];
          }
          acc += phi * inner;
        }
      }
      partial.push_back(acc);
    }
    out[ti] = K.prefactor * dx * pairwise_sum(std::span<const std::complex<double>>(partial));
  }
  return out;
}

}  // namespace htlab
