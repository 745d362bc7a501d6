#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace htlab {

using cplx = std::complex<double>;

/// Default maximum number of samples of a grid.
inline constexpr std::size_t kDefaultGridBudget = std::size_t{1} << 22;

/// One axis. Closed axes sample [lo, hi] including both ends; periodic axes
/// sample [lo, hi) with `count` points.
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  bool periodic = false;

  double spacing() const { return periodic ? (hi - lo) / count : (hi - lo) / (count - 1); }
  double coord(std::size_t i) const { return lo + static_cast<double>(i) * spacing(); }
  bool operator==(const Axis&) const = default;
};

/// Tensor grid, row-major (last axis fastest). The first `split` axes belong
/// to the first layer g1, the rest to the center g2.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<Axis> axes, int split = -1, std::size_t budget = kDefaultGridBudget);

  /// Grid over g1: `dims` closed axes [-T, T] with N points each (N >= 8, T > 0).
  static Grid symmetric(int dims, double T, std::size_t N, std::size_t budget = kDefaultGridBudget);

  int dims() const { return static_cast<int>(axes_.size()); }
  int split() const { return split_; }
  std::size_t size() const { return size_; }
  const Axis& axis(int i) const { return axes_[i]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t stride(int i) const { return strides_[i]; }
  double cell_volume() const;
  /// Multi-index of a flat index.
  void unravel(std::size_t flat, std::size_t* idx) const;
  /// Coordinates of a flat index.
  void coords(std::size_t flat, double* out) const;
  bool operator==(const Grid& o) const { return axes_ == o.axes_ && split_ == o.split_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  int split_ = 0;
};

/// Bits of GridFunction::flags.
enum GridFlags : std::uint32_t {
  kFlagCoarseGrid = 1u,  ///< finite-difference resolution warning (h^2 lambda^2 T^2 > 1)
};

/// Complex samples on a grid.
struct GridFunction {
  Grid grid;
  std::vector<cplx> v;
  std::uint32_t flags = 0;

  GridFunction() = default;
  explicit GridFunction(Grid g) : grid(std::move(g)), v(grid.size()) {}

  /// Samples f(coordinates) on every grid point.
  static GridFunction sample(const Grid& g, const std::function<cplx(const double*)>& f);
};

void require_same_grid(const GridFunction& a, const GridFunction& b);

/// Trapezoidal inner product (f, g) = sum conj(f) g dV, pairwise summed.
cplx inner(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);
/// ||f - g||.
double distance(const GridFunction& f, const GridFunction& g);
/// a f + b g.
GridFunction combine(cplx a, const GridFunction& f, cplx b, const GridFunction& g);
GridFunction scaled(cplx a, const GridFunction& f);

/// Norm restricted to points at least `band` cells away from every closed boundary.
double interior_norm(const GridFunction& f, int band);
/// ||f - g|| restricted as above.
double interior_distance(const GridFunction& f, const GridFunction& g, int band);

}  // namespace htlab
