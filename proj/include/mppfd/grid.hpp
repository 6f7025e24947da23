#pragma once

// Uniform periodic grids, node-valued scalar fields and line access.
//
// Nodes follow the open convention: x_i = x_min + i*dx for i = 0..nx-1 and
// x_max is identified with x_min. Storage is row-major with x fastest, so a
// row (fixed j) is contiguous and a column (fixed i) has stride nx.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mppfd/errors.hpp"

namespace mppfd {

enum class Axis { x, y };

/// Wraps any integer index into [0, n).
inline std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

class Grid2D {
 public:
  /// Smallest node count per direction; the flux stencils reach seven distinct
  /// nodes and the periodic wrap must not alias them.
  static constexpr std::size_t min_nodes = 8;

  Grid2D(double x_min, double x_max, double y_min, double y_max, std::size_t nx, std::size_t ny)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), nx_(nx), ny_(ny) {
    if (!(x_max > x_min)) {
      throw ConfigError("grid: x_max must exceed x_min (got x_min=" + std::to_string(x_min) +
                        ", x_max=" + std::to_string(x_max) + ")");
    }
    if (!(y_max > y_min)) {
      throw ConfigError("grid: y_max must exceed y_min (got y_min=" + std::to_string(y_min) +
                        ", y_max=" + std::to_string(y_max) + ")");
    }
    if (nx < min_nodes) {
      throw ConfigError("grid: n_x must be at least " + std::to_string(min_nodes) + " (got " +
                        std::to_string(nx) + ")");
    }
    if (ny < min_nodes) {
      throw ConfigError("grid: n_y must be at least " + std::to_string(min_nodes) + " (got " +
                        std::to_string(ny) + ")");
    }
    dx_ = (x_max - x_min) / static_cast<double>(nx);
    dy_ = (y_max - y_min) / static_cast<double>(ny);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double length_x() const { return x_max_ - x_min_; }
  double length_y() const { return y_max_ - y_min_; }
  double cell_area() const { return dx_ * dy_; }

  double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
  double y(std::size_t j) const { return y_min_ + static_cast<double>(j) * dy_; }

  std::size_t n(Axis a) const { return a == Axis::x ? nx_ : ny_; }
  double spacing(Axis a) const { return a == Axis::x ? dx_ : dy_; }
  double length(Axis a) const { return a == Axis::x ? length_x() : length_y(); }

  std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  double x_min_, x_max_, y_min_, y_max_;
  std::size_t nx_, ny_;
  double dx_ = 0.0, dy_ = 0.0;
};

inline Grid2D make_grid(double x_min, double x_max, double y_min, double y_max, std::size_t nx,
                        std::size_t ny) {
  return Grid2D(x_min, x_max, y_min, y_max, nx, ny);
}

/// Strided, read-write view of one grid line with periodic indexing.
template <typename T>
class LineView {
 public:
  LineView(T* base, std::size_t n, std::size_t stride) : base_(base), n_(n), stride_(stride) {}

  std::size_t size() const { return n_; }
  T& operator[](std::size_t k) const { return base_[k * stride_]; }
  T& periodic(std::ptrdiff_t k) const { return base_[wrap_index(k, n_) * stride_]; }

 private:
  T* base_;
  std::size_t n_;
  std::size_t stride_;
};

class ScalarField {
 public:
  explicit ScalarField(const Grid2D& grid, double fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}

  ScalarField(const Grid2D& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ConfigError("field: value count " + std::to_string(values_.size()) +
                        " does not match grid size " + std::to_string(grid_.size()));
    }
  }

  const Grid2D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[j * grid_.nx() + i]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[j * grid_.nx() + i]; }

  /// Periodic access: any integer index pair is folded onto the grid.
  double at(std::ptrdiff_t i, std::ptrdiff_t j) const {
    return values_[wrap_index(j, grid_.ny()) * grid_.nx() + wrap_index(i, grid_.nx())];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> row(std::size_t j) { return {values_.data() + j * grid_.nx(), grid_.nx()}; }
  std::span<const double> row(std::size_t j) const {
    return {values_.data() + j * grid_.nx(), grid_.nx()};
  }

  /// Line `index` along `axis`: a row (fixed j) for Axis::x, a column (fixed i) for Axis::y.
  LineView<double> line(Axis axis, std::size_t index) {
    return axis == Axis::x ? LineView<double>(values_.data() + index * grid_.nx(), grid_.nx(), 1)
                           : LineView<double>(values_.data() + index, grid_.ny(), grid_.nx());
  }
  LineView<const double> line(Axis axis, std::size_t index) const {
    return axis == Axis::x
               ? LineView<const double>(values_.data() + index * grid_.nx(), grid_.nx(), 1)
               : LineView<const double>(values_.data() + index, grid_.ny(), grid_.nx());
  }

  void extract_line(Axis axis, std::size_t index, std::span<double> out) const {
    auto v = line(axis, index);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k];
  }

  void insert_line(Axis axis, std::size_t index, std::span<const double> in) {
    auto v = line(axis, index);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = in[k];
  }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Node-wise advection velocity. The maxima alpha_x = max|u_x| and
/// alpha_y = max|u_y| are computed on construction; components are immutable.
class VelocityField {
 public:
  VelocityField(ScalarField u_x, ScalarField u_y) : u_x_(std::move(u_x)), u_y_(std::move(u_y)) {
    if (!(u_x_.grid() == u_y_.grid())) throw ConfigError("velocity: components live on different grids");
    alpha_x_ = max_abs(u_x_);
    alpha_y_ = max_abs(u_y_);
  }

  const Grid2D& grid() const { return u_x_.grid(); }
  const ScalarField& u_x() const { return u_x_; }
  const ScalarField& u_y() const { return u_y_; }
  const ScalarField& component(Axis a) const { return a == Axis::x ? u_x_ : u_y_; }
  double alpha_x() const { return alpha_x_; }
  double alpha_y() const { return alpha_y_; }

 private:
  static double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }

  ScalarField u_x_, u_y_;
  double alpha_x_ = 0.0, alpha_y_ = 0.0;
};

/// values[i,j] = func(x_i, y_j); a non-finite sample is rejected with its node.
template <typename Func>
ScalarField sample(const Grid2D& grid, Func&& func) {
  ScalarField field(grid);
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double v = func(grid.x(i), grid.y(j));
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "sample: non-finite value " << v << " at node (" << i << ", " << j << ") x=" << grid.x(i)
            << " y=" << grid.y(j);
        throw NumericalFailure(msg.str());
      }
      field(i, j) = v;
    }
  }
  return field;
}

// Snapshot text format: a header line `nx ny x_min x_max y_min y_max time`
// followed by ny lines of nx values in scientific notation.

inline void write_snapshot(std::ostream& os, const ScalarField& field, double time) {
  const auto& g = field.grid();
  os << std::setprecision(17) << std::scientific;
  os << g.nx() << ' ' << g.ny() << ' ' << g.x_min() << ' ' << g.x_max() << ' ' << g.y_min() << ' '
     << g.y_max() << ' ' << time << '\n';
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      if (i) os << ' ';
      os << field(i, j);
    }
    os << '\n';
  }
}

inline void write_snapshot(const std::string& path, const ScalarField& field, double time) {
  std::ofstream os(path);
  if (!os) throw ConfigError("snapshot: cannot open '" + path + "' for writing");
  write_snapshot(os, field, time);
}

struct Snapshot {
  ScalarField field;
  double time;
};

inline Snapshot read_snapshot(std::istream& is) {
  std::size_t nx = 0, ny = 0;
  double x0, x1, y0, y1, t;
  if (!(is >> nx >> ny >> x0 >> x1 >> y0 >> y1 >> t)) throw ConfigError("snapshot: malformed header");
  Grid2D grid(x0, x1, y0, y1, nx, ny);
  std::vector<double> values(grid.size());
  for (auto& v : values) {
    if (!(is >> v)) throw ConfigError("snapshot: truncated value block");
  }
  return {ScalarField(grid, std::move(values)), t};
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("snapshot: cannot open '" + path + "'");
  return read_snapshot(is);
}

}  // namespace mppfd
