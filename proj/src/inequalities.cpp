#include "anisobound/inequalities.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "anisobound/format.hpp"
#include "anisobound/powers.hpp"

namespace anisobound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_zero_boundary(const GridFunction& u, const char* what) {
  const Grid& g = u.grid();
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    if (g.is_boundary_node(node) && u[node] != 0.0) {
      throw std::domain_error(std::string(what) + ": function must vanish on the grid boundary");
    }
  }
}

double geometric_mean(const std::vector<double>& factors) {
  double log_sum = 0.0;
  for (double f : factors) {
    if (f == 0.0) return 0.0;
    log_sum += std::log(f);
  }
  return std::exp(log_sum / static_cast<double>(factors.size()));
}

std::string point_string(const Point& x) { return join17(x, ' '); }

}  // namespace

double empirical_constant(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  if (rhs == 0.0) return kInf;
  return lhs / rhs;
}

double quadrature_norm(const CellField& f, Exponent beta, const Region& region) {
  const Grid& g = f.grid;
  if (beta.is_infinite()) {
    double m = 0.0;
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      if (region(g.cell_center(c))) m = std::max(m, std::abs(f.values[c]));
    }
    return m;
  }
  const double b = beta.value();
  if (!(b > 0.0)) throw std::domain_error("quadrature norm needs beta > 0");
  double s = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    if (region(g.cell_center(c))) s += abs_pow(f.values[c], b);
  }
  return std::pow(s * g.cell_volume(), 1.0 / b);
}

double inverse_weight_norm(const std::vector<double>& lambda_cells, const Grid& grid, Exponent r,
                           const Region& region) {
  CellField inv{grid, std::vector<double>(lambda_cells.size())};
  for (std::size_t c = 0; c < lambda_cells.size(); ++c) inv.values[c] = 1.0 / lambda_cells[c];
  return quadrature_norm(inv, r, region);
}

InequalityReport verify_lower_bound(const ModelIntegrand& m, const GridFunction& u,
                                    const std::vector<Interval>& sub_box) {
  const Grid& g = u.grid();
  if (static_cast<int>(sub_box.size()) != g.dim()) {
    throw std::domain_error("lower bound: sub-box has wrong dimension");
  }
  for (int i = 0; i < g.dim(); ++i) {
    if (!(sub_box[i].lo > g.box()[i].lo && sub_box[i].hi < g.box()[i].hi &&
          sub_box[i].lo < sub_box[i].hi)) {
      throw std::domain_error("lower bound: sub-box must lie strictly inside the grid");
    }
  }
  const Region region = inside_box(sub_box);
  const CellWeights w = sample_weights(m, g);
  const DerivedExponents d = derive(m.exponents());
  const auto du = gradient(u);

  double lhs = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    const double inv_norm = inverse_weight_norm(w.lambda[i], g, m.exponents().r()[i], region);
    const double grad_norm = quadrature_norm(du[i], Exponent::finite(d.sigma[i]), region);
    if (inv_norm > 0.0) lhs += abs_pow(grad_norm, m.exponents().p()[i]) / inv_norm;
  }
  lhs /= g.dim();

  InequalityReport rep;
  rep.check = "lower_bound";
  std::string box;
  for (const Interval& iv : sub_box) box += (box.empty() ? "" : " ") + fmt17(iv.lo) + ":" + fmt17(iv.hi);
  rep.parameters = "box=" + box;
  rep.lhs = lhs;
  rep.rhs_structure = energy(m, w, u, region);
  rep.c_emp = empirical_constant(rep.lhs, rep.rhs_structure);
  rep.passed = rep.c_emp <= 1.0 + 1e-9;
  return rep;
}

InequalityReport verify_embedding(const GridFunction& u, const DerivedExponents& d) {
  if (!d.sigma_star) throw std::domain_error("embedding needs sigma_bar < n");
  require_zero_boundary(u, "embedding");
  const Grid& g = u.grid();
  const auto du = gradient(u);
  const Region all = everywhere();
  std::vector<double> factors;
  for (int i = 0; i < g.dim(); ++i) {
    factors.push_back(quadrature_norm(du[i], Exponent::finite(d.sigma[i]), all));
  }
  InequalityReport rep;
  rep.check = "embedding";
  rep.parameters = "sigma_star=" + fmt17(*d.sigma_star);
  rep.lhs = quadrature_norm(cell_average(u), Exponent::finite(*d.sigma_star), all);
  rep.rhs_structure = geometric_mean(factors);
  rep.c_emp = empirical_constant(rep.lhs, rep.rhs_structure);
  rep.passed = std::isfinite(rep.c_emp);
  return rep;
}

InequalityReport verify_poincare_sobolev(const ModelIntegrand& m, const GridFunction& v,
                                         const DerivedExponents& d) {
  if (!d.sigma_star) throw std::domain_error("Poincare-Sobolev needs sigma_bar < n");
  require_zero_boundary(v, "Poincare-Sobolev");
  const Grid& g = v.grid();
  const CellWeights w = sample_weights(m, g);
  const auto dv = gradient(v);
  const Region all = everywhere();
  std::vector<double> factors;
  for (int i = 0; i < g.dim(); ++i) {
    const double p = m.exponents().p()[i];
    const double inv_norm = inverse_weight_norm(w.lambda[i], g, m.exponents().r()[i], all);
    double s = 0.0;
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      s += w.lambda[i][c] * abs_pow(dv[i].values[c], p);
    }
    factors.push_back(std::pow(inv_norm * s * g.cell_volume(), 1.0 / p));
  }
  InequalityReport rep;
  rep.check = "poincare_sobolev";
  rep.parameters = "sigma_star=" + fmt17(*d.sigma_star);
  rep.lhs = quadrature_norm(cell_average(v), Exponent::finite(*d.sigma_star), all);
  rep.rhs_structure = geometric_mean(factors);
  rep.c_emp = empirical_constant(rep.lhs, rep.rhs_structure);
  rep.passed = std::isfinite(rep.c_emp);
  return rep;
}

InequalityReport verify_weight_domination(const ModelIntegrand& m, const Grid& grid) {
  const CellWeights w = sample_weights(m, grid);
  InequalityReport rep;
  rep.check = "weight_domination";
  rep.parameters = "cells=" + std::to_string(grid.num_cells());
  double worst = 0.0;
  std::size_t violations = 0;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    for (int i = 0; i < m.dim(); ++i) {
      const double lam = w.lambda[i][c];
      const double bound = 2.0 * w.upper[c];
      if (lam > bound) ++violations;
      const double ratio = empirical_constant(lam, bound);
      if (ratio > worst) {
        worst = ratio;
        rep.lhs = lam;
        rep.rhs_structure = bound;
      }
    }
  }
  rep.c_emp = worst;
  rep.passed = violations == 0;
  return rep;
}

InequalityReport verify_caccioppoli(const ModelIntegrand& m, const GridFunction& u,
                                    const CaccioppoliParams& prm) {
  const Grid& g = u.grid();
  if (!(prm.rho > 0.0 && prm.rho < prm.R)) throw std::domain_error("Caccioppoli needs 0 < rho < R");
  if (!(prm.k >= 1.0)) throw std::domain_error("Caccioppoli needs k >= 1");
  const Ball outer{prm.x0, prm.R};
  if (!g.contains(outer)) throw std::domain_error("Caccioppoli ball leaves the grid");

  const Exponents& e = m.exponents();
  const CellWeights w = sample_weights(m, g);
  const CellField f = integrand_density(m, w, u);
  const CellField avg = cell_average(u);
  const double rho2 = prm.rho * prm.rho;
  const double R2 = prm.R * prm.R;
  const double vol = g.cell_volume();
  const double k_gamma = std::pow(prm.k, e.gamma());

  double lhs = 0.0;
  double level_term = 0.0;
  CellField upper_on_ball{g, std::vector<double>(g.num_cells(), 0.0)};
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    const double r2 = squared_distance(g.cell_center(c), prm.x0);
    if (!(r2 < R2)) continue;
    upper_on_ball.values[c] = w.upper[c];
    if (!(avg.values[c] > prm.k)) continue;
    level_term += w.upper[c] * (abs_pow(avg.values[c] - prm.k, e.q()) + k_gamma);
    if (r2 < rho2) lhs += f.values[c];
  }
  lhs *= vol;
  level_term *= vol;

  const DerivedExponents d = derive(e);
  const double mu_norm = quadrature_norm(upper_on_ball, e.s(), inside_ball(outer));
  const double measure = superlevel_measure(u, prm.k, outer);
  const double rhs = level_term / std::pow(prm.R - prm.rho, e.q()) +
                     mu_norm * std::pow(measure, 1.0 / d.s_prime);

  InequalityReport rep;
  rep.check = "caccioppoli";
  rep.parameters = "k=" + fmt17(prm.k) + ";rho=" + fmt17(prm.rho) + ";R=" + fmt17(prm.R) +
                   ";x0=" + point_string(prm.x0);
  rep.lhs = lhs;
  rep.rhs_structure = rhs;
  rep.c_emp = empirical_constant(lhs, rhs);
  rep.passed = std::isfinite(rep.c_emp);
  return rep;
}

double higher_integrability_norm(const GridFunction& u, const Exponents& e,
                                 const DerivedExponents& d, const Ball& ball) {
  return quadrature_norm(cell_average(u), Exponent::finite(e.q() * d.s_prime), inside_ball(ball));
}

GridFunction bump_cutoff(const GridFunction& u) {
  const Grid& g = u.grid();
  std::vector<double> v(g.num_nodes());
  for (std::size_t node = 0; node < v.size(); ++node) {
    double b = 1.0;
    for (int i = 0; i < g.dim(); ++i) {
      const Interval& iv = g.box()[i];
      const double x = g.node_coordinate(node, i);
      const double len = iv.hi - iv.lo;
      b *= 4.0 * (x - iv.lo) * (iv.hi - x) / (len * len);
    }
    v[node] = g.is_boundary_node(node) ? 0.0 : u[node] * b;
  }
  return GridFunction(g, std::move(v));
}

void write_reports_csv(std::ostream& os, const std::vector<InequalityReport>& reports) {
  os << "check,parameters,lhs,rhs_structure,c_emp\n";
  for (const InequalityReport& r : reports) {
    os << r.check << ',' << r.parameters << ',' << fmt17(r.lhs) << ',' << fmt17(r.rhs_structure)
       << ',' << fmt17(r.c_emp) << '\n';
  }
}

}  // namespace anisobound
