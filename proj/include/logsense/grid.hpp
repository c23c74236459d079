#ifndef LOGSENSE_GRID_HPP_
#define LOGSENSE_GRID_HPP_

// Uniform cell-centered tensor meshes in 1-3 dimensions with reflecting
// (zero-flux) boundaries.
//
// Cells are stored row-major: the last active axis varies fastest.  Faces
// normal to axis a form an array with cells[a]+1 entries along a and the
// cell counts along every other axis; face i along a is the lower face of
// cell i.  Boundary faces carry zero flux by construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace logsense {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 24;

struct Grid {
  int dim = 1;
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> cells{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};

  static Grid make(std::span<const std::size_t> counts, std::span<const double> lengths,
                   std::size_t max_cells = kDefaultMaxCells) {
    if (counts.empty() || counts.size() > 3) throw GridError("grid: dimension must be 1, 2 or 3");
    if (counts.size() != lengths.size()) throw GridError("grid: cells and extents must have equal length");
    Grid g;
    g.dim = static_cast<int>(counts.size());
    std::size_t total = 1;
    for (int a = 0; a < g.dim; ++a) {
      if (counts[a] < 4) throw GridError("grid: at least 4 cells per axis required");
      if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) throw GridError("grid: extents must be positive");
      g.cells[a] = counts[a];
      g.extents[a] = lengths[a];
      g.h[a] = lengths[a] / static_cast<double>(counts[a]);
      if (!(g.h[a] > 0.0) || !std::isfinite(g.h[a])) throw GridError("grid: spacing must be positive and finite");
      if (total > max_cells / counts[a]) throw GridError("grid: total cell count exceeds configured maximum");
      total *= counts[a];
    }
    return g;
  }

  static Grid uniform(int dim, std::size_t n, double length = 1.0) {
    std::vector<std::size_t> c(static_cast<std::size_t>(dim), n);
    std::vector<double> e(static_cast<std::size_t>(dim), length);
    return make(c, e);
  }

  std::size_t size() const { return cells[0] * cells[1] * cells[2]; }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= h[a];
    return v;
  }

  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= extents[a];
    return v;
  }

  double min_spacing() const {
    double m = h[0];
    for (int a = 1; a < dim; ++a) m = std::min(m, h[a]);
    return m;
  }

  /// Product of cell counts of axes after `axis` (the index stride of that axis).
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = axis + 1; a < dim; ++a) s *= cells[a];
    return s;
  }

  /// Product of cell counts of axes before `axis`.
  std::size_t outer(int axis) const {
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= cells[a];
    return s;
  }

  std::size_t face_count(int axis) const { return size() / cells[axis] * (cells[axis] + 1); }

  std::array<std::size_t, 3> unravel(std::size_t idx) const {
    std::array<std::size_t, 3> m{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      m[a] = idx % cells[a];
      idx /= cells[a];
    }
    return m;
  }

  double center(int axis, std::size_t i) const { return (static_cast<double>(i) + 0.5) * h[axis]; }

  bool same_shape(const Grid& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
      if (cells[a] != o.cells[a] || extents[a] != o.extents[a]) return false;
    return true;
  }
};

enum class Sign { any, nonnegative, strictly_positive };

/// Cell-centered scalar grid function.
struct Field {
  Grid grid;
  std::vector<double> values;
  Sign sign = Sign::any;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0, Sign s = Sign::any) : grid(g), values(g.size(), fill), sign(s) {}
  Field(const Grid& g, std::vector<double> vals, Sign s = Sign::any) : grid(g), values(std::move(vals)), sign(s) {
    if (values.size() != grid.size()) throw GridError("field: value count does not match grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
  }

  /// Checks finiteness and the sign tag; throws GridError on violation.
  void check(const char* what = "field") const {
    if (!all_finite()) throw GridError(std::string(what) + ": non-finite value");
    if (sign == Sign::strictly_positive && !(min() > 0.0))
      throw GridError(std::string(what) + ": tagged strictly positive but min <= 0");
    if (sign == Sign::nonnegative && min() < 0.0)
      throw GridError(std::string(what) + ": tagged nonnegative but has negative values");
  }
};

/// Per-axis arrays of face values.
struct FaceArrays {
  Grid grid;
  std::array<std::vector<double>, 3> axis;

  explicit FaceArrays(const Grid& g) : grid(g) {
    for (int a = 0; a < g.dim; ++a) axis[a].assign(g.face_count(a), 0.0);
  }
};

/// Samples f at cell centers; f receives (x, y, z) with unused axes at 0.
inline Field sample(const Grid& g, const std::function<double(double, double, double)>& f, Sign s = Sign::any) {
  Field out(g, 0.0, s);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.unravel(i);
    const double x = g.center(0, m[0]);
    const double y = g.dim > 1 ? g.center(1, m[1]) : 0.0;
    const double z = g.dim > 2 ? g.center(2, m[2]) : 0.0;
    out.values[i] = f(x, y, z);
  }
  return out;
}

namespace detail {

// Visits every (lower cell, upper cell, face) triple of interior faces along `axis`.
template <class Fn>
inline void for_each_interior_face(const Grid& g, int axis, Fn&& fn) {
  const std::size_t n = g.cells[axis];
  const std::size_t inner = g.stride(axis);
  const std::size_t outer = g.outer(axis);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t lo = (o * n + i - 1) * inner;
      const std::size_t face = (o * (n + 1) + i) * inner;
      for (std::size_t k = 0; k < inner; ++k) fn(lo + k, lo + inner + k, face + k);
    }
  }
}

// Visits (cell, lower face, upper face) for every cell along `axis`.
template <class Fn>
inline void for_each_cell_faces(const Grid& g, int axis, Fn&& fn) {
  const std::size_t n = g.cells[axis];
  const std::size_t inner = g.stride(axis);
  const std::size_t outer = g.outer(axis);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cell = (o * n + i) * inner;
      const std::size_t face = (o * (n + 1) + i) * inner;
      for (std::size_t k = 0; k < inner; ++k) fn(cell + k, face + k, face + inner + k);
    }
  }
}

}  // namespace detail

/// Second-order Δ with mirrored ghost cells (discrete ∂f/∂ν = 0).
inline Field laplacian_neumann(const Field& f) {
  const Grid& g = f.grid;
  Field out(g, 0.0);
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h2 = 1.0 / (g.h[a] * g.h[a]);
    detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t) {
      const double d = (f.values[hi] - f.values[lo]) * inv_h2;
      out.values[lo] += d;
      out.values[hi] -= d;
    });
  }
  return out;
}

/// (f_{i+1} − f_i)/h on interior faces, 0 on boundary faces.
inline FaceArrays face_gradient(const Field& f) {
  const Grid& g = f.grid;
  FaceArrays out(g);
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    auto& dst = out.axis[a];
    detail::for_each_interior_face(g, a, [&](std::size_t lo, std::size_t hi, std::size_t face) {
      dst[face] = (f.values[hi] - f.values[lo]) * inv_h;
    });
  }
  return out;
}

/// Conservative divergence: Σ_axes (F_upper − F_lower)/h per cell.
inline Field face_divergence(const FaceArrays& flux) {
  const Grid& g = flux.grid;
  Field out(g, 0.0);
  for (int a = 0; a < g.dim; ++a) {
    const double inv_h = 1.0 / g.h[a];
    const auto& src = flux.axis[a];
    detail::for_each_cell_faces(g, a, [&](std::size_t cell, std::size_t lower, std::size_t upper) {
      out.values[cell] += (src[upper] - src[lower]) * inv_h;
    });
  }
  return out;
}

/// Arithmetic mean of the two adjacent cells on interior faces; boundary faces
/// take the adjacent cell value.
inline FaceArrays face_average(const Field& f) {
  const Grid& g = f.grid;
  FaceArrays out(g);
  for (int a = 0; a < g.dim; ++a) {
    auto& dst = out.axis[a];
    detail::for_each_cell_faces(g, a, [&](std::size_t cell, std::size_t lower, std::size_t upper) {
      dst[lower] += 0.5 * f.values[cell];
      dst[upper] += 0.5 * f.values[cell];
    });
    // Boundary faces saw a single contribution; double them.
    const std::size_t n = g.cells[a];
    const std::size_t inner = g.stride(a);
    for (std::size_t o = 0; o < g.outer(a); ++o)
      for (std::size_t k = 0; k < inner; ++k) {
        dst[(o * (n + 1)) * inner + k] *= 2.0;
        dst[(o * (n + 1) + n) * inner + k] *= 2.0;
      }
  }
  return out;
}

/// Midpoint quadrature Σ f_i · |cell|.
inline double integrate(const Field& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.grid.cell_volume();
}

/// Σ over faces of all axes times |cell| (the dual volume of an interior face).
inline double integrate_faces(const FaceArrays& fa) {
  double s = 0.0;
  for (int a = 0; a < fa.grid.dim; ++a)
    for (double x : fa.axis[a]) s += x;
  return s * fa.grid.cell_volume();
}

inline bool is_boundary_cell(const Grid& g, std::size_t idx) {
  const auto m = g.unravel(idx);
  for (int a = 0; a < g.dim; ++a)
    if (m[a] == 0 || m[a] + 1 == g.cells[a]) return true;
  return false;
}

/// Minimum over boundary-adjacent cells.
inline double boundary_min(const Field& f) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (is_boundary_cell(f.grid, i)) m = std::min(m, f.values[i]);
  return m;
}

/// Cell-centered gradient component along `axis`: mean of the two face gradients.
inline Field cell_gradient_component(const FaceArrays& grad, int axis) {
  const Grid& g = grad.grid;
  Field out(g, 0.0);
  const auto& src = grad.axis[axis];
  detail::for_each_cell_faces(g, axis, [&](std::size_t cell, std::size_t lower, std::size_t upper) {
    out.values[cell] = 0.5 * (src[lower] + src[upper]);
  });
  return out;
}

/// |∇f| per cell from averaged face gradients.
inline Field cell_gradient_norm(const Field& f) {
  const FaceArrays grad = face_gradient(f);
  Field out(f.grid, 0.0);
  for (int a = 0; a < f.grid.dim; ++a) {
    const Field c = cell_gradient_component(grad, a);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += c.values[i] * c.values[i];
  }
  for (double& x : out.values) x = std::sqrt(x);
  return out;
}

/// Applies fn to every value.
template <class Fn>
inline Field map(const Field& f, Fn&& fn, Sign s = Sign::any) {
  Field out(f.grid, 0.0, s);
  for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = fn(f.values[i]);
  return out;
}

/// ∫ |a − b| on a shared grid.
inline double l1_distance(const Field& a, const Field& b) {
  if (!a.grid.same_shape(b.grid)) throw GridError("l1_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.grid.cell_volume();
}

/// Face-weighted L¹ distance Σ |a − b| |cell| over all face arrays.
inline double l1_distance(const FaceArrays& a, const FaceArrays& b) {
  if (!a.grid.same_shape(b.grid)) throw GridError("l1_distance: grid mismatch");
  double s = 0.0;
  for (int ax = 0; ax < a.grid.dim; ++ax)
    for (std::size_t i = 0; i < a.axis[ax].size(); ++i) s += std::abs(a.axis[ax][i] - b.axis[ax][i]);
  return s * a.grid.cell_volume();
}

/// Averages a field onto a grid coarser by an integer factor per axis.
inline Field restrict_to(const Field& fine, const Grid& coarse) {
  const Grid& g = fine.grid;
  if (g.dim != coarse.dim) throw GridError("restrict_to: dimension mismatch");
  std::array<std::size_t, 3> ratio{1, 1, 1};
  for (int a = 0; a < g.dim; ++a) {
    if (g.extents[a] != coarse.extents[a] || g.cells[a] % coarse.cells[a] != 0)
      throw GridError("restrict_to: grids are not nested");
    ratio[a] = g.cells[a] / coarse.cells[a];
  }
  Field out(coarse, 0.0);
  const double w = 1.0 / static_cast<double>(ratio[0] * ratio[1] * ratio[2]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.unravel(i);
    std::size_t c = 0;
    for (int a = 0; a < g.dim; ++a) c = c * coarse.cells[a] + m[a] / ratio[a];
    out.values[c] += w * fine.values[i];
  }
  return out;
}

}  // namespace logsense

#endif  // LOGSENSE_GRID_HPP_
