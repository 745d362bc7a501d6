#include "htlab/counterexample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "htlab/errors.hpp"
#include "htlab/parallel.hpp"
#include "htlab/twisted.hpp"

namespace htlab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_phase_space_grid(const Grid& g, int n, const char* who) {
  if (g.dims() != 2 * n) throw GridMismatch(std::string(who) + ": grid must cover R^{2n}");
  for (const Axis& a : g.axes())
    if (a.periodic || a.count % 2 == 0 || std::abs(a.lo + a.hi) > 1e-12 * std::abs(a.hi))
      throw GridMismatch(std::string(who) + ": axes must be closed, symmetric and odd");
}

// Applies the centered DFT matrix along one axis in place.
void transform_axis(GridFunction& f, int axis, double h) {
  const Grid& g = f.grid;
  const std::size_t N = g.axis(axis).count, S = g.stride(axis);
  const double c = 0.5 * static_cast<double>(N - 1);
  std::vector<cplx> W(N * N);
  for (std::size_t m = 0; m < N; ++m)
    for (std::size_t i = 0; i < N; ++i) {
      // exp(-i zeta_m z_i) with zeta_m z_i = 2 pi (m - c)(i - c) / N, reduced mod N first
      const double mm = static_cast<double>(m) - c, ii = static_cast<double>(i) - c;
      const double ph = std::fmod(mm * ii, static_cast<double>(N));
      W[m * N + i] = h * std::polar(1.0, -2 * kPi * ph / static_cast<double>(N));
    }
  const std::size_t lines = g.size() / N;
  const long long L = static_cast<long long>(lines);
#pragma omp parallel
  {
    std::vector<cplx> in(N);
#pragma omp for schedule(static)
    for (long long l = 0; l < L; ++l) {
      const std::size_t lo = static_cast<std::size_t>(l) % S, hi = static_cast<std::size_t>(l) / S;
      const std::size_t base = hi * S * N + lo;
      for (std::size_t i = 0; i < N; ++i) in[i] = f.v[base + i * S];
      for (std::size_t m = 0; m < N; ++m) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) acc += W[m * N + i] * in[i];
        f.v[base + m * S] = acc;
      }
    }
  }
}

}  // namespace

Rational::Rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw DomainError("rational with zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p, q);
  num = g ? p / g : 0;
  den = g ? q / g : 1;
}

Rational Rational::parse(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto slash = s.find('/');
    const std::int64_t p = std::stoll(s.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? s.size() : slash)) throw DomainError("");
    if (slash == std::string::npos) return Rational(p);
    const std::string qs = s.substr(slash + 1);
    const std::int64_t q = std::stoll(qs, &used);
    if (used != qs.size()) throw DomainError("");
    return Rational(p, q);
  } catch (const std::exception&) {
    throw DomainError("cannot parse '" + s + "' as a rational number");
  }
}

std::string Rational::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

Rational operator*(const Rational& a, const Rational& b) {
  const Rational x(a.num, b.den), y(b.num, a.den);  // cross-reduce before multiplying
  return Rational(x.num * y.num, x.den * y.den);
}

CounterexampleRow counterexample_row(const MultiIndex& nu, const MultiIndex& nup, const Grid& grid) {
  const int n = static_cast<int>(nu.size());
  if (n < 1 || nup.size() != nu.size()) throw DomainError("counterexample_row: nu and nu' need the same positive length");
  for (int v : nu)
    if (v < 0) throw DomainError("counterexample_row: negative index");
  for (int v : nup)
    if (v < 0) throw DomainError("counterexample_row: negative index");
  if (length(nu) + length(nup) > kCounterexampleBudget)
    throw BudgetError("counterexample_row: |nu| + |nu'| exceeds " + std::to_string(kCounterexampleBudget));
  require_phase_space_grid(grid, n, "counterexample_row");

  CounterexampleRow r;
  r.n = n;
  r.nu = nu;
  r.nup = nup;
  r.eig_h = length(nu) + length(nup) + n;
  r.eig_a = 2 * length(nu) + n;
  r.ratio = Rational(r.eig_h, r.eig_a);

  const GridFunction g = sample_matrix_coefficient(nu, nup, 1.0, grid);
  const double ng = norm(g);
  const double n2 = ng * ng;
  r.form_h = rayleigh_quotient(Operator::H, 1.0, g);
  r.form_a = rayleigh_quotient(Operator::L0, 1.0, g);
  double gs = 0.0;
  for (const GridFunction& d : gradient(g)) {
    const double nd = norm(d);
    gs += nd * nd;
  }
  r.grad_sq = gs / n2;
  std::vector<double> pot(grid.size());
  std::vector<double> z(grid.dims());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.coords(i, z.data());
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    pot[i] = 0.25 * r2 * std::norm(g.v[i]);
  }
  r.potential = pairwise_sum(std::span<const double>(pot)) * grid.cell_volume() / n2;
  r.eig_error = std::max(std::abs(r.form_h - static_cast<double>(r.eig_h)) / static_cast<double>(r.eig_h),
                         std::abs(r.form_a - static_cast<double>(r.eig_a)) / static_cast<double>(r.eig_a));
  r.identity_error = std::abs(r.form_h - r.grad_sq - r.potential) / r.form_h;
  r.summands_ok = r.grad_sq <= r.form_h * (1 + 1e-3) && r.potential <= r.form_h * (1 + 1e-3);
  r.flags = apply_H(1.0, g).flags;
  return r;
}

RefutationReport refutation_scan(int n, const MultiIndex& nu, const std::vector<int>& ladder, const Rational& C) {
  if (n < 1 || static_cast<int>(nu.size()) != n) throw DomainError("refutation_scan: nu must have n entries");
  if (!(C > Rational(0))) throw DomainError("refutation_scan: C must be positive");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 0) throw DomainError("refutation_scan: negative ladder entry");
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw DomainError("refutation_scan: ladder must increase");
  }
  RefutationReport rep;
  rep.n = n;
  rep.nu = nu;
  rep.target = C * C;
  const std::int64_t a = 2 * length(nu) + n;
  for (int level : ladder) {
    RefutationStep s;
    s.level = level;
    s.ratio = Rational(length(nu) + level + n, a);
    if (!rep.steps.empty() && !(s.ratio > rep.steps.back().ratio)) rep.increasing = false;
    rep.steps.push_back(s);
    if (rep.first < 0 && s.ratio > rep.target) {
      rep.first = static_cast<int>(rep.steps.size()) - 1;
      rep.inconclusive = false;
    }
  }
  return rep;
}

GridFunction apply_A_hat(const GridFunction& f) { return apply_quadratic(f, 0.25, 1.0, cplx(0.0, -1.0)); }

GridFunction fourier_transform(const GridFunction& g) {
  std::vector<Axis> axes;
  for (const Axis& a : g.grid.axes()) {
    if (a.periodic || a.count % 2 == 0) throw GridMismatch("fourier_transform: axes must be closed and odd");
    const double dz = 2 * kPi / (static_cast<double>(a.count) * a.spacing());
    const double half = 0.5 * static_cast<double>(a.count - 1) * dz;
    axes.push_back(Axis{-half, half, a.count, false});
  }
  GridFunction out(Grid(axes, g.grid.split()));
  out.v = g.v;
  for (int a = 0; a < g.grid.dims(); ++a) transform_axis(out, a, g.grid.axis(a).spacing());
  return out;
}

Grid conjugation_grid() { return Grid::symmetric(2, 20.0, 321); }

ConjugationReport fourier_conjugation_check(const MultiIndex& nu, const MultiIndex& nup, const Grid& grid, cplx c) {
  const int n = static_cast<int>(nu.size());
  if (n < 1 || nup.size() != nu.size()) throw DomainError("fourier_conjugation_check: index lengths differ");
  if (length(nu) + length(nup) > kCounterexampleBudget)
    throw BudgetError("fourier_conjugation_check: |nu| + |nu'| exceeds " + std::to_string(kCounterexampleBudget));
  require_phase_space_grid(grid, n, "fourier_conjugation_check");
  ConjugationReport rep;
  if (c == 0.0) return rep;
  const GridFunction g = scaled(c, sample_matrix_coefficient(nu, nup, 1.0, grid));

  const GridFunction ghat = fourier_transform(g);
  const GridFunction lhs = fourier_transform(apply_L0(1.0, g));
  const GridFunction rhs = apply_A_hat(ghat);
  rep.residual = distance(lhs, rhs);
  rep.relative = rep.residual / norm(ghat);

  // h(zeta) = g(2 zeta) on `grid`; the doubled grid has the same spacing, so 2 zeta_i is its point 2 i
  std::vector<Axis> wide;
  for (const Axis& ax : grid.axes()) wide.push_back(Axis{2 * ax.lo, 2 * ax.hi, 2 * ax.count - 1, false});
  const Grid big(wide, grid.split());
  const GridFunction Ag = apply_L0(1.0, scaled(c, sample_matrix_coefficient(nu, nup, 1.0, big)));
  const int d = grid.dims();
  // samples of g on the grid scaled by 2 are the samples of h on `grid`
  std::vector<Axis> twice;
  for (const Axis& ax : grid.axes()) twice.push_back(Axis{2 * ax.lo, 2 * ax.hi, ax.count, false});
  GridFunction h = scaled(c, sample_matrix_coefficient(nu, nup, 1.0, Grid(twice, grid.split())));
  h.grid = grid;
  const GridFunction lhs2 = apply_A_hat(h);
  GridFunction rhs2(grid);
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.unravel(i, idx.data());
    std::size_t flat = 0;
    for (int ax = 0; ax < d; ++ax) flat += 2 * idx[ax] * big.stride(ax);
    rhs2.v[i] = Ag.v[flat];
  }
  rep.rescaling = distance(lhs2, rhs2) / norm(rhs2);
  return rep;
}

}  // namespace htlab
