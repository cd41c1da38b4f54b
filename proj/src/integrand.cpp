#include "anisobound/integrand.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "anisobound/format.hpp"
#include "anisobound/powers.hpp"

namespace anisobound {

WeightField WeightField::constant(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("constant weight must be finite and >= 0");
  }
  WeightField w;
  w.kind_ = Kind::constant;
  w.amplitude_ = value;
  return w;
}

WeightField WeightField::power(double amplitude, Point center, double exponent) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw std::invalid_argument("power weight amplitude must be finite and >= 0");
  }
  if (!std::isfinite(exponent)) throw std::invalid_argument("power weight exponent must be finite");
  WeightField w;
  w.kind_ = Kind::power;
  w.amplitude_ = amplitude;
  w.center_ = std::move(center);
  w.exponent_ = exponent;
  return w;
}

double WeightField::at(std::span<const double> x) const {
  if (kind_ == Kind::constant) return amplitude_;
  const double r = std::sqrt(squared_distance(x, center_));
  if (r == 0.0) {
    if (exponent_ < 0.0) return std::numeric_limits<double>::infinity();
    return exponent_ == 0.0 ? amplitude_ : 0.0;
  }
  return amplitude_ * std::pow(r, exponent_);
}

double WeightField::at_cell(std::span<const double> x, double h) const {
  if (kind_ == Kind::constant) return amplitude_;
  if (squared_distance(x, center_) > 1e-24 * h * h) return at(x);
  Point shifted(x.begin(), x.end());
  shifted[0] += 0.5 * h;
  return at(shifted);
}

namespace {

void check_weight_dimension(const WeightField& w, int n, const std::string& name) {
  if (w.kind() == WeightField::Kind::power && static_cast<int>(w.center().size()) != n) {
    throw std::invalid_argument(name + ": centre has wrong dimension");
  }
}

// A power weight with negative exponent lies in L^s_loc iff -a s < n.
void check_upper_integrable(const WeightField& w, const Exponents& e, const std::string& name) {
  if (w.kind() != WeightField::Kind::power || w.exponent() >= 0.0) return;
  if (e.s().is_infinite()) {
    throw std::invalid_argument(name + ": singular weight is not in L^inf (s = inf)");
  }
  if (!(-w.exponent() * e.s().value() < e.n())) {
    throw std::invalid_argument(name + ": singular weight not in L^s (need -a s < n)");
  }
}

}  // namespace

ModelIntegrand::ModelIntegrand(Exponents exponents, std::vector<WeightField> lambdas,
                               WeightField mu, double u_coeff)
    : exponents_(std::move(exponents)),
      lambdas_(std::move(lambdas)),
      mu_(std::move(mu)),
      u_coeff_(u_coeff) {
  const int n = exponents_.n();
  if (static_cast<int>(lambdas_.size()) != n) {
    throw std::invalid_argument("need exactly n lambda weights");
  }
  if (!std::isfinite(u_coeff_) || u_coeff_ < 0.0) {
    throw std::invalid_argument("u_coeff must be finite and >= 0");
  }
  for (int i = 0; i < n; ++i) {
    const std::string name = "lambda" + std::to_string(i + 1);
    const WeightField& w = lambdas_[i];
    check_weight_dimension(w, n, name);
    if (!(w.amplitude() > 0.0)) throw std::invalid_argument(name + ": amplitude must be > 0");
    if (w.kind() == WeightField::Kind::power && w.exponent() > 0.0) {
      const Exponent r = exponents_.r()[i];
      if (r.is_infinite()) {
        throw std::invalid_argument(name + ": degenerate weight has unbounded inverse (r = inf)");
      }
      if (!(w.exponent() * r.value() < n)) {
        throw std::invalid_argument(name + ": inverse not in L^r (need a r < n)");
      }
    }
    check_upper_integrable(w, exponents_, name);
  }
  check_weight_dimension(mu_, n, "mu");
  if (u_coeff_ > 0.0) check_upper_integrable(mu_, exponents_, "mu");
}

ModelIntegrand ModelIntegrand::with_upper_weight_override(WeightField w) const {
  check_weight_dimension(w, dim(), "upper weight override");
  ModelIntegrand copy = *this;
  copy.upper_override_ = std::move(w);
  return copy;
}

double ModelIntegrand::eval(std::span<const double> x, double u,
                            std::span<const double> xi) const {
  double f = 0.0;
  for (int i = 0; i < dim(); ++i) f += lambdas_[i].at(x) * abs_pow(xi[i], exponents_.p()[i]);
  if (u_coeff_ > 0.0) f += u_coeff_ * mu_.at(x) * abs_pow(u, exponents_.gamma());
  return f;
}

double ModelIntegrand::upper_weight(std::span<const double> x) const {
  if (upper_override_) return upper_override_->at(x);
  double w = 0.0;
  for (const WeightField& l : lambdas_) w += l.at(x);
  if (u_coeff_ > 0.0) w += u_coeff_ * mu_.at(x);
  return w;
}

double eval_integrand(const ModelIntegrand& m, std::span<const double> x, double u,
                      std::span<const double> xi) {
  return m.eval(x, u, xi);
}

CellWeights sample_weights(const ModelIntegrand& m, const Grid& grid) {
  if (grid.dim() != m.dim()) throw std::invalid_argument("grid and model dimensions differ");
  const std::size_t cells = grid.num_cells();
  CellWeights w;
  w.lambda.assign(static_cast<std::size_t>(m.dim()), std::vector<double>(cells));
  w.mu.resize(cells);
  w.upper.resize(cells);
  const double h = grid.h();
  for (std::size_t c = 0; c < cells; ++c) {
    const auto x = grid.cell_center(c);
    double sum = 0.0;
    for (int i = 0; i < m.dim(); ++i) {
      const double l = m.lambdas()[i].at_cell(x, h);
      w.lambda[i][c] = l;
      sum += l;
    }
    w.mu[c] = m.mu().at_cell(x, h);
    if (m.upper_weight_override()) {
      w.upper[c] = m.upper_weight_override()->at_cell(x, h);
    } else {
      w.upper[c] = sum + (m.u_coeff() > 0.0 ? m.u_coeff() * w.mu[c] : 0.0);
    }
  }
  return w;
}

SandwichReport check_growth(const ModelIntegrand& m, std::span<const GrowthSample> samples) {
  SandwichReport rep;
  rep.samples = samples.size();
  rep.max_lower_violation = -std::numeric_limits<double>::infinity();
  rep.max_upper_violation = -std::numeric_limits<double>::infinity();
  const Exponents& e = m.exponents();
  for (const GrowthSample& s : samples) {
    const double f = m.eval(s.x, s.u, s.xi);
    double lower = 0.0;
    double norm2 = 0.0;
    for (int i = 0; i < m.dim(); ++i) {
      lower += m.lambdas()[i].at(s.x) * abs_pow(s.xi[i], e.p()[i]);
      norm2 += s.xi[i] * s.xi[i];
    }
    const double upper = m.upper_weight(s.x) *
                         (std::pow(std::sqrt(norm2), e.q()) + abs_pow(s.u, e.gamma()) + 1.0);
    rep.max_lower_violation = std::max(rep.max_lower_violation, lower - f);
    rep.max_upper_violation = std::max(rep.max_upper_violation, f - upper);
  }
  if (samples.empty()) rep.max_lower_violation = rep.max_upper_violation = 0.0;
  return rep;
}

ConvexityReport check_convexity(const ModelIntegrand& m, std::span<const ConvexitySample> pairs) {
  ConvexityReport rep;
  rep.samples = pairs.size();
  rep.max_excess = pairs.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  std::vector<double> mid(static_cast<std::size_t>(m.dim()));
  for (const ConvexitySample& s : pairs) {
    for (int i = 0; i < m.dim(); ++i) mid[i] = 0.5 * (s.xi_a[i] + s.xi_b[i]);
    const double fa = m.eval(s.x, s.u_a, s.xi_a);
    const double fb = m.eval(s.x, s.u_b, s.xi_b);
    const double fm = m.eval(s.x, 0.5 * (s.u_a + s.u_b), mid);
    const double mean = 0.5 * (fa + fb);
    const double excess = fm - mean;
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > 1e-12 * (1.0 + std::abs(mean))) ++rep.violations;
  }
  return rep;
}

CellField integrand_density(const ModelIntegrand& m, const CellWeights& w, const GridFunction& u) {
  const Grid& g = u.grid();
  if (g.dim() != m.dim()) throw std::invalid_argument("grid and model dimensions differ");
  for (int c : g.node_counts()) {
    if (c < 2) throw std::domain_error("energy needs at least two nodes per axis");
  }
  const auto corners = g.corner_offsets();
  const double inv_corners = 1.0 / static_cast<double>(corners.size());
  const double inv_h = 1.0 / g.h();
  const Exponents& e = m.exponents();
  CellField out{g, std::vector<double>(g.num_cells())};
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const std::size_t base = g.cell_base_node(c);
    double f = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
      const double du = (u[base + g.node_stride(i)] - u[base]) * inv_h;
      f += w.lambda[i][c] * abs_pow(du, e.p()[i]);
    }
    if (m.u_coeff() > 0.0) {
      double avg = 0.0;
      for (std::size_t off : corners) avg += u[base + off];
      avg *= inv_corners;
      f += m.u_coeff() * w.mu[c] * abs_pow(avg, e.gamma());
    }
    out.values[c] = f;
  }
  return out;
}

double energy(const ModelIntegrand& m, const CellWeights& w, const GridFunction& u,
              const Region& region) {
  const CellField f = integrand_density(m, w, u);
  const Grid& g = u.grid();
  double s = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (region(g.cell_center(c))) s += f.values[c];
  }
  return s * g.cell_volume();
}

double energy(const ModelIntegrand& m, const GridFunction& u, const Region& region) {
  return energy(m, sample_weights(m, u.grid()), u, region);
}

}  // namespace anisobound
