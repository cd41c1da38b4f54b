#include "anisobound/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "anisobound/powers.hpp"

namespace anisobound {

namespace {

// Neumaier compensated summation; the descent compares energies whose
// differences sit near round-off once the residual is small.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SmoothPower {
  double p;
  double eps;
  double eps_p;
  bool smooth;

  SmoothPower(double p_, double eps_)
      : p(p_), eps(eps_), eps_p(std::pow(eps_, p_)), smooth(p_ < 2.0 && eps_ > 0.0) {}

  [[nodiscard]] double value(double t) const {
    if (!smooth) return abs_pow(t, p);
    return std::pow(t * t + eps * eps, 0.5 * p) - eps_p;
  }
  [[nodiscard]] double derivative(double t) const {
    if (!smooth) return abs_pow_derivative(t, p);
    return p * t * std::pow(t * t + eps * eps, 0.5 * p - 1.0);
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double interior_sup(const Grid& g, const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!g.is_boundary_node(i)) m = std::max(m, std::abs(v[i]));
  }
  return m;
}

}  // namespace

void validate(const SolveConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(cfg.step.initial_step > 0.0)) throw std::invalid_argument("initial_step must be > 0");
  if (!(cfg.step.shrink > 0.0 && cfg.step.shrink < 1.0)) {
    throw std::invalid_argument("shrink factor must lie in (0, 1)");
  }
  if (!(cfg.step.armijo > 0.0 && cfg.step.armijo < 1.0)) {
    throw std::invalid_argument("armijo constant must lie in (0, 1)");
  }
  if (cfg.smoothing_eps && !(*cfg.smoothing_eps >= 0.0)) {
    throw std::invalid_argument("smoothing_eps must be >= 0");
  }
}

double smoothed_energy(const ModelIntegrand& m, const CellWeights& w, const GridFunction& u,
                       double eps, std::vector<double>* gradient) {
  const Grid& g = u.grid();
  const int n = g.dim();
  const Exponents& e = m.exponents();
  std::vector<SmoothPower> grad_pow;
  grad_pow.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grad_pow.emplace_back(e.p()[i], eps);
  const SmoothPower u_pow(e.gamma(), eps);
  const bool with_u = m.u_coeff() > 0.0;

  const auto corners = g.corner_offsets();
  const double inv_corners = 1.0 / static_cast<double>(corners.size());
  const double inv_h = 1.0 / g.h();
  const double vol = g.cell_volume();

  if (gradient) gradient->assign(g.num_nodes(), 0.0);
  CompensatedSum total;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const std::size_t base = g.cell_base_node(c);
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t stride = g.node_stride(i);
      const double du = (u[base + stride] - u[base]) * inv_h;
      const double lam = w.lambda[i][c];
      f += lam * grad_pow[i].value(du);
      if (gradient) {
        const double gi = vol * lam * grad_pow[i].derivative(du) * inv_h;
        (*gradient)[base + stride] += gi;
        (*gradient)[base] -= gi;
      }
    }
    if (with_u) {
      double avg = 0.0;
      for (std::size_t off : corners) avg += u[base + off];
      avg *= inv_corners;
      const double coeff = m.u_coeff() * w.mu[c];
      f += coeff * u_pow.value(avg);
      if (gradient) {
        const double gu = vol * coeff * u_pow.derivative(avg) * inv_corners;
        for (std::size_t off : corners) (*gradient)[base + off] += gu;
      }
    }
    total.add(f * vol);
  }
  if (gradient) {
    for (std::size_t i = 0; i < gradient->size(); ++i) {
      if (g.is_boundary_node(i)) (*gradient)[i] = 0.0;
    }
  }
  return total.value();
}

SolveResult solve(const ModelIntegrand& m, const GridFunction& start, const SolveConfig& cfg) {
  validate(cfg);
  const Grid& g = start.grid();
  if (g.dim() != m.dim()) throw std::invalid_argument("grid and model dimensions differ");
  const CellWeights w = sample_weights(m, g);
  const double eps = cfg.smoothing_eps.value_or(g.h() * g.h());
  const double vol = g.cell_volume();
  const std::size_t nodes = g.num_nodes();

  std::vector<double> u(start.values().begin(), start.values().end());
  std::vector<double> grad;
  auto evaluate = [&](const std::vector<double>& x, std::vector<double>* gr) {
    return smoothed_energy(m, w, GridFunction(g, x), eps, gr);
  };

  double E = evaluate(u, &grad);
  SolveResult result{start, E, 0, false, interior_sup(g, grad) / vol, {E}};

  std::vector<double> dir(nodes);
  for (std::size_t i = 0; i < nodes; ++i) dir[i] = -grad[i];
  std::vector<double> trial(nodes), probe_grad, new_grad;
  double step = cfg.step.initial_step;
  const double tiny_step = 1e-300;

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    result.residual = interior_sup(g, grad) / vol;
    if (result.residual <= cfg.grad_tol) {
      result.converged = true;
      break;
    }
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < nodes; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
    }

    // Secant estimate of the line minimizer from one probe gradient.
    for (std::size_t i = 0; i < nodes; ++i) trial[i] = u[i] + step * dir[i];
    evaluate(trial, &probe_grad);
    const double curvature = (dot(probe_grad, dir) - slope) / step;
    double t = curvature > 0.0 ? -slope / curvature : 2.0 * step;
    if (!std::isfinite(t) || t <= 0.0) t = step;

    double E_new = 0.0;
    bool accepted = false;
    while (t > tiny_step) {
      for (std::size_t i = 0; i < nodes; ++i) trial[i] = u[i] + t * dir[i];
      E_new = evaluate(trial, &new_grad);
      if (std::isfinite(E_new)) {
        const bool armijo = E_new <= E + cfg.step.armijo * t * slope;
        // For a convex energy a non-positive directional derivative at the
        // trial point implies decrease along the whole segment; this resolves
        // steps whose decrease is below the round-off of E. The recorded
        // energy must still not go up.
        const bool downhill = dot(new_grad, dir) <= 0.0 && E_new <= E;
        if (armijo || downhill) {
          accepted = true;
          break;
        }
      }
      t *= cfg.step.shrink;
    }
    if (!accepted) break;

    double beta = 0.0;
    if (cfg.descent == Descent::conjugate_gradient) {
      const double gg = dot(grad, grad);
      double num = 0.0;
      for (std::size_t i = 0; i < nodes; ++i) num += new_grad[i] * (new_grad[i] - grad[i]);
      beta = gg > 0.0 ? std::max(0.0, num / gg) : 0.0;
    }
    u.swap(trial);
    grad.swap(new_grad);
    E = E_new;
    step = t;
    for (std::size_t i = 0; i < nodes; ++i) dir[i] = -grad[i] + beta * dir[i];
    result.energy_history.push_back(E);
  }
  result.iterations = it;
  result.residual = interior_sup(g, grad) / vol;
  result.converged = result.residual <= cfg.grad_tol;
  result.final_energy = E;
  result.u = GridFunction(g, std::move(u));
  return result;
}

BoundaryFunction BoundaryFunction::affine(double c0, std::vector<double> a) {
  BoundaryFunction b;
  b.kind_ = Kind::affine;
  b.c0_ = c0;
  b.coeffs_ = std::move(a);
  return b;
}

BoundaryFunction BoundaryFunction::radial(Point center, double amplitude, double exponent,
                                          double offset) {
  if (!(exponent >= 0.0)) throw std::invalid_argument("radial exponent must be >= 0");
  BoundaryFunction b;
  b.kind_ = Kind::radial;
  b.c0_ = offset;
  b.coeffs_ = std::move(center);
  b.amplitude_ = amplitude;
  b.exponent_ = exponent;
  return b;
}

BoundaryFunction BoundaryFunction::product(Point center, double amplitude, double offset) {
  BoundaryFunction b;
  b.kind_ = Kind::product;
  b.c0_ = offset;
  b.coeffs_ = std::move(center);
  b.amplitude_ = amplitude;
  return b;
}

int BoundaryFunction::dim() const { return static_cast<int>(coeffs_.size()); }

double BoundaryFunction::operator()(std::span<const double> x) const {
  switch (kind_) {
    case Kind::affine: {
      double v = c0_;
      for (std::size_t i = 0; i < coeffs_.size(); ++i) v += coeffs_[i] * x[i];
      return v;
    }
    case Kind::radial:
      return c0_ + amplitude_ * std::pow(std::sqrt(squared_distance(x, coeffs_)), exponent_);
    case Kind::product: {
      double v = amplitude_;
      for (std::size_t i = 0; i < coeffs_.size(); ++i) v *= x[i] - coeffs_[i];
      return c0_ + v;
    }
  }
  return 0.0;
}

GridFunction dirichlet_start(const Grid& grid, const BoundaryFunction& g, InitialGuess initial) {
  if (g.dim() != grid.dim()) throw std::invalid_argument("boundary data has wrong dimension");
  std::vector<double> v(grid.num_nodes(), 0.0);
  for (std::size_t node = 0; node < v.size(); ++node) {
    if (grid.is_boundary_node(node) || initial == InitialGuess::extension) {
      v[node] = g(grid.node_point(node));
    }
  }
  return GridFunction(grid, std::move(v));
}

QuasiminimalityReport verify_quasiminimality(const ModelIntegrand& m, const GridFunction& u,
                                             double Q,
                                             std::span<const GridFunction> perturbations) {
  if (!(Q >= 1.0)) throw std::invalid_argument("quasi-minimality constant must be >= 1");
  const Grid& g = u.grid();
  const CellWeights w = sample_weights(m, g);
  const auto corners = g.corner_offsets();
  QuasiminimalityReport rep;
  double worst = 0.0;
  bool any_ratio = false;
  for (const GridFunction& phi : perturbations) {
    if (!(phi.grid() == g)) throw std::invalid_argument("perturbation grid mismatch");
    for (std::size_t node = 0; node < g.num_nodes(); ++node) {
      if (g.is_boundary_node(node) && phi[node] != 0.0) {
        throw std::invalid_argument("perturbation does not vanish on the boundary");
      }
    }
    std::vector<unsigned char> support(g.num_cells(), 0);
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      const std::size_t base = g.cell_base_node(c);
      for (std::size_t off : corners) {
        if (phi[base + off] != 0.0) {
          support[c] = 1;
          break;
        }
      }
    }
    const CellField fu = integrand_density(m, w, u);
    const CellField fv = integrand_density(m, w, u.plus(phi));
    CompensatedSum lhs, rhs;
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      if (!support[c]) continue;
      lhs.add(fu.values[c]);
      rhs.add(fv.values[c]);
    }
    QuasiminimalityCheck check;
    check.lhs = lhs.value() * g.cell_volume();
    check.rhs = rhs.value() * g.cell_volume();
    check.passed = check.lhs <= Q * check.rhs + 1e-10;
    if (!check.passed) ++rep.failures;
    if (check.rhs > 0.0) {
      worst = std::max(worst, check.lhs / check.rhs);
      any_ratio = true;
    }
    rep.checks.push_back(check);
  }
  rep.empirical_q = any_ratio ? worst : 1.0;
  return rep;
}

std::vector<GridFunction> random_perturbations(const Grid& grid, std::size_t count,
                                               std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  const int n = grid.dim();
  std::vector<GridFunction> out;
  out.reserve(count);
  for (int c : grid.node_counts()) {
    if (c < 3) throw std::invalid_argument("perturbations need an interior node on every axis");
  }
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<int> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      const int last = grid.node_counts()[i] - 2;  // interior nodes are 1..last
      std::uniform_int_distribution<int> pick(1, last);
      int a = pick(rng);
      int b = pick(rng);
      if (a > b) std::swap(a, b);
      lo[i] = a;
      hi[i] = b;
    }
    std::uniform_real_distribution<double> val(-amplitude, amplitude);
    std::vector<double> v(grid.num_nodes(), 0.0);
    for (std::size_t node = 0; node < v.size(); ++node) {
      bool inside = true;
      for (int i = 0; i < n && inside; ++i) {
        const int idx = static_cast<int>((node / grid.node_stride(i)) %
                                         static_cast<std::size_t>(grid.node_counts()[i]));
        inside = idx >= lo[i] && idx <= hi[i];
      }
      if (inside) v[node] = val(rng);
    }
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

}  // namespace anisobound
