#pragma once

// Uniform rectangular grids on boxes, nodal and cell-centred scalar fields,
// forward-difference gradients, cell-quadrature L^beta norms and super-level
// set measures.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "anisobound/exponents.hpp"

namespace anisobound {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

using Point = std::vector<double>;

/// Open Euclidean ball B_R(x0).
struct Ball {
  Point center;
  double radius = 0.0;
};

/// Immutable uniform grid. Copies share the underlying geometry.
class Grid {
 public:
  [[nodiscard]] int dim() const { return data_->dim; }
  [[nodiscard]] double h() const { return data_->h; }
  [[nodiscard]] const std::vector<Interval>& box() const { return data_->box; }
  [[nodiscard]] const std::vector<int>& node_counts() const { return data_->node_counts; }
  [[nodiscard]] const std::vector<int>& cell_counts() const { return data_->cell_counts; }
  [[nodiscard]] std::size_t num_nodes() const { return data_->num_nodes; }
  [[nodiscard]] std::size_t num_cells() const { return data_->num_cells; }

  /// h^n.
  [[nodiscard]] double cell_volume() const { return data_->cell_volume; }

  /// Row-major stride of axis i in the node array (last axis fastest).
  [[nodiscard]] std::size_t node_stride(int axis) const { return data_->node_strides[axis]; }
  /// Node-index offsets of the 2^n corners of a cell relative to its lowest corner.
  [[nodiscard]] std::span<const std::size_t> corner_offsets() const {
    return data_->corner_offsets;
  }
  /// Node index of the lowest corner of each cell.
  [[nodiscard]] std::size_t cell_base_node(std::size_t cell) const {
    return data_->cell_base[cell];
  }
  /// Cell centre coordinates, contiguous per cell.
  [[nodiscard]] std::span<const double> cell_center(std::size_t cell) const {
    return {data_->cell_centers.data() + cell * data_->dim, static_cast<std::size_t>(data_->dim)};
  }
  [[nodiscard]] Point node_point(std::size_t node) const;
  [[nodiscard]] double node_coordinate(std::size_t node, int axis) const;
  [[nodiscard]] bool is_boundary_node(std::size_t node) const {
    return data_->boundary[node] != 0;
  }

  /// Closed containment of the ball's bounding box in the grid box.
  [[nodiscard]] bool contains(const Ball& ball) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.data_ == b.data_ || (a.box() == b.box() && a.h() == b.h());
  }

 private:
  struct Data {
    int dim = 0;
    double h = 0.0;
    double cell_volume = 0.0;
    std::vector<Interval> box;
    std::vector<int> node_counts;
    std::vector<int> cell_counts;
    std::size_t num_nodes = 0;
    std::size_t num_cells = 0;
    std::vector<std::size_t> node_strides;
    std::vector<std::size_t> corner_offsets;
    std::vector<std::size_t> cell_base;
    std::vector<double> cell_centers;
    std::vector<unsigned char> boundary;
  };

  explicit Grid(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  friend Grid make_grid(std::vector<Interval> box, double h);

  std::shared_ptr<const Data> data_;
};

/// Throws std::invalid_argument unless h divides every side to 1e-9 relative.
Grid make_grid(std::vector<Interval> box, double h);

/// Nodal field, row-major, all values finite.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values);
  static GridFunction zeros(const Grid& grid);
  static GridFunction sample(const Grid& grid,
                             const std::function<double(std::span<const double>)>& fn);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t node) const { return values_[node]; }

  [[nodiscard]] GridFunction scaled(double t) const;
  [[nodiscard]] GridFunction plus(const GridFunction& other) const;
  [[nodiscard]] double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Scalar field on the cell lattice (one value per cell).
struct CellField {
  Grid grid;
  std::vector<double> values;
};

/// Predicate on points; cell quadrature keeps cells whose centres satisfy it.
using Region = std::function<bool(std::span<const double>)>;

Region everywhere();
/// Open box: lo < x_i < hi on every axis.
Region inside_box(std::vector<Interval> box);
/// Open ball |x - x0| < R.
Region inside_ball(Ball ball);

/// Average of the 2^n corner values, per cell.
CellField cell_average(const GridFunction& u);

/// Forward differences along each axis from the lowest corner of every cell.
/// Throws std::domain_error when some axis has fewer than two nodes.
std::vector<CellField> gradient(const GridFunction& u);

/// (sum |f|^beta h^n)^(1/beta) over cells in the region, max |f| for beta = inf.
/// Empty region gives 0.
double lp_norm(const CellField& f, Exponent beta, const Region& region);

/// h^n times the number of nodes with |x - x0| < R and u > k.
double superlevel_measure(const GridFunction& u, double k, const Ball& ball);

/// Nodewise (u - k)_+.
GridFunction truncate(const GridFunction& u, double k);

/// |x - y|^2.
double squared_distance(std::span<const double> x, std::span<const double> y);

}  // namespace anisobound
