#include "anisobound/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "anisobound/format.hpp"
#include "anisobound/powers.hpp"

namespace anisobound {

Grid make_grid(std::vector<Interval> box, double h) {
  if (box.empty()) throw std::invalid_argument("grid box must have at least one axis");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid spacing must be > 0");

  auto data = std::make_shared<Grid::Data>();
  const int n = static_cast<int>(box.size());
  data->dim = n;
  data->h = h;
  data->cell_volume = std::pow(h, n);
  data->node_counts.resize(n);
  data->cell_counts.resize(n);
  for (int i = 0; i < n; ++i) {
    const double len = box[i].hi - box[i].lo;
    if (!std::isfinite(box[i].lo) || !std::isfinite(box[i].hi) || !(len >= 0.0)) {
      throw std::invalid_argument("grid axis " + std::to_string(i + 1) + " is reversed");
    }
    // A zero-length axis is a legal (degenerate) single-node axis; gradients
    // reject it later.
    const double steps = len / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * steps) {
      throw std::invalid_argument("spacing h=" + fmt17(h) + " does not divide axis " +
                                  std::to_string(i + 1) + " of length " + fmt17(len));
    }
    data->node_counts[i] = static_cast<int>(rounded) + 1;
    data->cell_counts[i] = static_cast<int>(rounded);
  }
  data->box = std::move(box);

  data->node_strides.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) {
    data->node_strides[i] = data->node_strides[i + 1] * data->node_counts[i + 1];
  }
  data->num_nodes = data->node_strides[0] * data->node_counts[0];
  data->num_cells = 1;
  for (int c : data->cell_counts) data->num_cells *= static_cast<std::size_t>(c);

  const std::size_t corners = std::size_t{1} << n;
  data->corner_offsets.resize(corners);
  for (std::size_t mask = 0; mask < corners; ++mask) {
    std::size_t off = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) off += data->node_strides[i];
    }
    data->corner_offsets[mask] = off;
  }

  data->cell_base.resize(data->num_cells);
  data->cell_centers.resize(data->num_cells * n);
  std::vector<int> idx(n, 0);
  for (std::size_t cell = 0; cell < data->num_cells; ++cell) {
    std::size_t base = 0;
    for (int i = 0; i < n; ++i) {
      base += idx[i] * data->node_strides[i];
      data->cell_centers[cell * n + i] = data->box[i].lo + (idx[i] + 0.5) * h;
    }
    data->cell_base[cell] = base;
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < data->cell_counts[i]) break;
      idx[i] = 0;
    }
  }

  data->boundary.assign(data->num_nodes, 0);
  std::fill(idx.begin(), idx.end(), 0);
  for (std::size_t node = 0; node < data->num_nodes; ++node) {
    bool on = false;
    for (int i = 0; i < n; ++i) {
      on = on || idx[i] == 0 || idx[i] == data->node_counts[i] - 1;
    }
    data->boundary[node] = on ? 1 : 0;
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < data->node_counts[i]) break;
      idx[i] = 0;
    }
  }
  return Grid(std::move(data));
}

double Grid::node_coordinate(std::size_t node, int axis) const {
  const std::size_t k = (node / data_->node_strides[axis]) %
                        static_cast<std::size_t>(data_->node_counts[axis]);
  return data_->box[axis].lo + static_cast<double>(k) * data_->h;
}

Point Grid::node_point(std::size_t node) const {
  Point x(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) x[i] = node_coordinate(node, i);
  return x;
}

bool Grid::contains(const Ball& ball) const {
  if (static_cast<int>(ball.center.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (ball.center[i] - ball.radius < box()[i].lo || ball.center[i] + ball.radius > box()[i].hi) {
      return false;
    }
  }
  return true;
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.num_nodes()) {
    throw std::invalid_argument("grid function has " + std::to_string(values_.size()) +
                                " values, grid has " + std::to_string(grid_.num_nodes()) +
                                " nodes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("grid function values must be finite");
  }
}

GridFunction GridFunction::zeros(const Grid& grid) {
  return GridFunction(grid, std::vector<double>(grid.num_nodes(), 0.0));
}

GridFunction GridFunction::sample(const Grid& grid,
                                  const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> v(grid.num_nodes());
  for (std::size_t node = 0; node < v.size(); ++node) {
    const Point x = grid.node_point(node);
    v[node] = fn(x);
  }
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::scaled(double t) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= t;
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::plus(const GridFunction& other) const {
  if (!(other.grid_ == grid_)) throw std::invalid_argument("grid mismatch in plus()");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return GridFunction(grid_, std::move(v));
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Region everywhere() {
  return [](std::span<const double>) { return true; };
}

Region inside_box(std::vector<Interval> box) {
  return [box = std::move(box)](std::span<const double> x) {
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!(x[i] > box[i].lo && x[i] < box[i].hi)) return false;
    }
    return true;
  };
}

Region inside_ball(Ball ball) {
  const double r2 = ball.radius * ball.radius;
  return [center = std::move(ball.center), r2](std::span<const double> x) {
    return squared_distance(x, center) < r2;
  };
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

CellField cell_average(const GridFunction& u) {
  const Grid& g = u.grid();
  const auto corners = g.corner_offsets();
  const double w = 1.0 / static_cast<double>(corners.size());
  CellField out{g, std::vector<double>(g.num_cells())};
  for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
    const std::size_t base = g.cell_base_node(cell);
    double s = 0.0;
    for (std::size_t off : corners) s += u[base + off];
    out.values[cell] = s * w;
  }
  return out;
}

std::vector<CellField> gradient(const GridFunction& u) {
  const Grid& g = u.grid();
  for (int c : g.node_counts()) {
    if (c < 2) throw std::domain_error("gradient needs at least two nodes per axis");
  }
  const double inv_h = 1.0 / g.h();
  std::vector<CellField> out;
  out.reserve(static_cast<std::size_t>(g.dim()));
  for (int axis = 0; axis < g.dim(); ++axis) {
    CellField comp{g, std::vector<double>(g.num_cells())};
    const std::size_t stride = g.node_stride(axis);
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
      const std::size_t base = g.cell_base_node(cell);
      comp.values[cell] = (u[base + stride] - u[base]) * inv_h;
    }
    out.push_back(std::move(comp));
  }
  return out;
}

double lp_norm(const CellField& f, Exponent beta, const Region& region) {
  const Grid& g = f.grid;
  if (beta.is_infinite()) {
    double m = 0.0;
    for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
      if (region(g.cell_center(cell))) m = std::max(m, std::abs(f.values[cell]));
    }
    return m;
  }
  const double b = beta.value();
  if (!(b >= 1.0)) throw std::domain_error("L^beta norm needs beta >= 1");
  double s = 0.0;
  for (std::size_t cell = 0; cell < g.num_cells(); ++cell) {
    if (region(g.cell_center(cell))) s += abs_pow(f.values[cell], b);
  }
  return std::pow(s * g.cell_volume(), 1.0 / b);
}

double superlevel_measure(const GridFunction& u, double k, const Ball& ball) {
  const Grid& g = u.grid();
  const double r2 = ball.radius * ball.radius;
  std::size_t count = 0;
  Point x(static_cast<std::size_t>(g.dim()));
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    if (!(u[node] > k)) continue;
    for (int i = 0; i < g.dim(); ++i) x[i] = g.node_coordinate(node, i);
    if (squared_distance(x, ball.center) < r2) ++count;
  }
  return static_cast<double>(count) * g.cell_volume();
}

GridFunction truncate(const GridFunction& u, double k) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x = std::max(x - k, 0.0);
  return GridFunction(u.grid(), std::move(v));
}

}  // namespace anisobound
