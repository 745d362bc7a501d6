#include "htlab/grid.hpp"

#include "htlab/errors.hpp"
#include "htlab/parallel.hpp"

#include <cmath>

namespace htlab {

Grid::Grid(std::vector<Axis> axes, int split, std::size_t budget) : axes_(std::move(axes)) {
  if (axes_.empty()) throw StructuralError("grid needs at least one axis");
  split_ = split < 0 ? dims() : split;
  if (split_ > dims()) throw StructuralError("grid split exceeds dimension");
  size_ = 1;
  for (const Axis& a : axes_) {
    if (a.count < 2 || !(a.hi > a.lo)) throw DomainError("grid axis needs count >= 2 and hi > lo");
    if (size_ > budget / a.count) throw BudgetError("grid exceeds sample budget");
    size_ *= a.count;
  }
  if (size_ > budget) throw BudgetError("grid exceeds sample budget");
  strides_.assign(axes_.size(), 1);
  for (int i = dims() - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * axes_[i + 1].count;
}

Grid Grid::symmetric(int dims, double T, std::size_t N, std::size_t budget) {
  if (N < 8) throw DomainError("grid needs N >= 8");
  if (!(T > 0)) throw DomainError("grid needs T > 0");
  return Grid(std::vector<Axis>(dims, Axis{-T, T, N, false}), dims, budget);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (const Axis& a : axes_) v *= a.spacing();
  return v;
}

void Grid::unravel(std::size_t flat, std::size_t* idx) const {
  for (int i = 0; i < dims(); ++i) {
    idx[i] = flat / strides_[i];
    flat -= idx[i] * strides_[i];
  }
}

void Grid::coords(std::size_t flat, double* out) const {
  for (int i = 0; i < dims(); ++i) {
    const std::size_t k = flat / strides_[i];
    flat -= k * strides_[i];
    out[i] = axes_[i].coord(k);
  }
}

GridFunction GridFunction::sample(const Grid& g, const std::function<cplx(const double*)>& f) {
  GridFunction out(g);
  std::vector<double> c(g.dims());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.coords(i, c.data());
    out.v[i] = f(c.data());
  }
  return out;
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid) || a.v.size() != b.v.size()) throw GridMismatch("grid functions live on different grids");
}

cplx inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  std::vector<cplx> t(f.v.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::conj(f.v[i]) * g.v[i];
  return pairwise_sum(std::span<const cplx>(t)) * f.grid.cell_volume();
}

double norm(const GridFunction& f) {
  std::vector<double> t(f.v.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(f.v[i]);
  return std::sqrt(pairwise_sum(std::span<const double>(t)) * f.grid.cell_volume());
}

double distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  std::vector<double> t(f.v.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(f.v[i] - g.v[i]);
  return std::sqrt(pairwise_sum(std::span<const double>(t)) * f.grid.cell_volume());
}

GridFunction combine(cplx a, const GridFunction& f, cplx b, const GridFunction& g) {
  require_same_grid(f, g);
  GridFunction out(f.grid);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a * f.v[i] + b * g.v[i];
  out.flags = f.flags | g.flags;
  return out;
}

GridFunction scaled(cplx a, const GridFunction& f) {
  GridFunction out = f;
  for (auto& x : out.v) x *= a;
  return out;
}

namespace {
bool inside_band(const Grid& g, std::size_t flat, int band) {
  for (int i = 0; i < g.dims(); ++i) {
    const std::size_t k = flat / g.stride(i) % g.axis(i).count;
    if (g.axis(i).periodic) continue;
    if (k < static_cast<std::size_t>(band) || k + band >= g.axis(i).count) return false;
  }
  return true;
}
}  // namespace

double interior_norm(const GridFunction& f, int band) {
  std::vector<double> t(f.v.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (inside_band(f.grid, i, band)) t[i] = std::norm(f.v[i]);
  return std::sqrt(pairwise_sum(std::span<const double>(t)) * f.grid.cell_volume());
}

double interior_distance(const GridFunction& f, const GridFunction& g, int band) {
  require_same_grid(f, g);
  std::vector<double> t(f.v.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (inside_band(f.grid, i, band)) t[i] = std::norm(f.v[i] - g.v[i]);
  return std::sqrt(pairwise_sum(std::span<const double>(t)) * f.grid.cell_volume());
}

}  // namespace htlab
