#include "anisobound/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "anisobound/format.hpp"
#include "anisobound/inequalities.hpp"
#include "anisobound/powers.hpp"

namespace anisobound {

namespace {

constexpr double kDecayFactor = 1e-10;
constexpr double kDecayFloor = 1e-30;

bool has_decayed(const std::vector<double>& J) {
  return J.back() <= kDecayFactor * std::max(J.front(), kDecayFloor);
}

// A lambda^h J^{1+alpha}. J^{1+alpha} alone can fall into the subnormal range
// long before the product does; it is then evaluated through logarithms.
double recursion_step(double J, double A, double lambda, double alpha, int h) {
  const double power = std::pow(J, 1.0 + alpha);
  const double scale = A * std::pow(lambda, h);
  if (power >= std::numeric_limits<double>::min() && std::isfinite(scale)) return scale * power;
  return std::exp(std::log(A) + h * std::log(lambda) + (1.0 + alpha) * std::log(J));
}

void require_ball(const Grid& g, const Point& x0, double R) {
  if (!(R > 0.0) || R > 1.0) throw std::domain_error("radius must satisfy 0 < R <= 1");
  if (!g.contains(Ball{x0, R})) throw std::domain_error("ball B_R(x0) leaves the grid");
}

}  // namespace

LevelStep sequences(double R, double d, int h) {
  if (!(d >= 2.0)) throw std::domain_error("level scale d must be >= 2");
  if (!(R > 0.0)) throw std::domain_error("radius must be > 0");
  if (h < 0) throw std::domain_error("step index must be >= 0");
  const double half = std::ldexp(1.0, -h);  // 2^-h
  LevelStep s;
  s.rho = 0.5 * R * (1.0 + half);
  s.k = d * (1.0 - 0.5 * half);
  s.rho_bar = 0.5 * R * (1.0 + 0.75 * half);
  return s;
}

std::vector<double> j_sequence(const GridFunction& u, const Point& x0, double R, double d,
                               const Exponents& e, int H) {
  if (H < 1) throw std::domain_error("need at least one iteration step");
  const Grid& g = u.grid();
  if (!g.contains(Ball{x0, R}) || !(R > 0.0)) {
    throw std::domain_error("ball B_R(x0) leaves the grid");
  }
  const double power = e.q() * derive(e).s_prime;
  const CellField avg = cell_average(u);
  std::vector<double> dist2(g.num_cells());
  for (std::size_t c = 0; c < g.num_cells(); ++c) dist2[c] = squared_distance(g.cell_center(c), x0);

  std::vector<double> J;
  J.reserve(static_cast<std::size_t>(H) + 1);
  for (int h = 0; h <= H; ++h) {
    const LevelStep s = sequences(R, d, h);
    const double rho2 = s.rho * s.rho;
    double sum = 0.0;
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      const double excess = avg.values[c] - s.k;
      if (excess > 0.0 && dist2[c] < rho2) sum += abs_pow(excess, power);
    }
    J.push_back(sum * g.cell_volume());
  }
  return J;
}

double hole_filling_constant(double theta, double alpha) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("hole filling needs 0 < theta < 1");
  if (!(alpha > 0.0)) throw std::domain_error("hole filling needs alpha > 0");
  const double tau = std::pow(0.5 * (1.0 + theta), 1.0 / alpha);
  return std::pow(1.0 - tau, -alpha) * (1.0 + theta) / (1.0 - theta);
}

HoleFillingReport hole_filling(std::span<const Sample> phi, double theta, double A, double B,
                               double alpha, double rho, double R) {
  if (!(A >= 0.0 && B >= 0.0)) throw std::domain_error("hole filling needs A, B >= 0");
  if (!(rho < R)) throw std::domain_error("hole filling needs rho < R");
  HoleFillingReport rep;
  rep.c_standard = hole_filling_constant(theta, alpha);

  const Sample* at_rho = nullptr;
  bool has_R = false;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i].phi >= 0.0)) throw std::domain_error("hole filling needs phi >= 0");
    if (i && !(phi[i].t > phi[i - 1].t)) throw std::domain_error("samples must be increasing in t");
    if (phi[i].t == rho) at_rho = &phi[i];
    if (phi[i].t == R) has_R = true;
  }
  if (!at_rho || !has_R) throw std::domain_error("rho and R must be sample abscissae");

  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = i + 1; j < phi.size(); ++j) {
      const double gap = phi[j].t - phi[i].t;
      const double excess = phi[i].phi - theta * phi[j].phi - A / std::pow(gap, alpha) - B;
      worst = std::max(worst, excess);
    }
  }
  rep.worst_hypothesis_excess = phi.size() > 1 ? worst : 0.0;
  rep.hypothesis_holds = rep.worst_hypothesis_excess <= 0.0;
  if (!rep.hypothesis_holds) return rep;

  rep.lhs = at_rho->phi;
  rep.rhs_structure = A / std::pow(R - rho, alpha) + B;
  rep.c_emp = empirical_constant(rep.lhs, rep.rhs_structure);
  rep.passed = rep.c_emp <= rep.c_standard;
  return rep;
}

FastConvergenceReport fast_convergence(double J0, double A, double lambda, double alpha, int H) {
  if (!(A > 0.0) || !(lambda > 1.0) || !(alpha > 0.0)) {
    throw std::domain_error("fast convergence needs A > 0, lambda > 1, alpha > 0");
  }
  if (!(J0 >= 0.0)) throw std::domain_error("fast convergence needs J0 >= 0");
  if (H < 0) throw std::domain_error("fast convergence needs H >= 0");
  FastConvergenceReport rep;
  rep.threshold = std::exp(-std::log(A) / alpha - std::log(lambda) / (alpha * alpha));
  rep.applicable = J0 <= rep.threshold * (1.0 + 1e-12);
  if (!rep.applicable) return rep;

  rep.J.push_back(J0);
  rep.bounds.push_back(J0);
  double J = J0;
  for (int h = 0; h < H; ++h) {
    J = J > 0.0 ? recursion_step(J, A, lambda, alpha, h) : 0.0;
    rep.J.push_back(J);
    const double decay = std::pow(lambda, -(h + 1) / alpha);
    rep.bounds.push_back(decay >= std::numeric_limits<double>::min() || J0 == 0.0
                             ? decay * J0
                             : std::exp(std::log(J0) - (h + 1) * std::log(lambda) / alpha));
  }
  rep.bound_holds = true;
  for (std::size_t h = 0; h < rep.J.size(); ++h) {
    if (rep.J[h] > rep.bounds[h] * (1.0 + 1e-12)) rep.bound_holds = false;
  }
  rep.decayed = J0 == 0.0 || rep.J.back() <= kDecayFactor * J0;
  return rep;
}

IterationTrace trace_from_masses(std::span<const double> J, const ExponentProfile& profile,
                                 const Point& x0, double R, double d, double norm, double C,
                                 int sign) {
  const IterationConstants& ic = profile.require_constants();
  const DerivedExponents& dx = profile.derived;
  if (J.empty()) throw std::domain_error("trace needs at least one mass");
  if (sign != 1 && sign != -1) throw std::domain_error("sign must be +1 or -1");
  if (!(R > 0.0) || R > 1.0) throw std::domain_error("radius must satisfy 0 < R <= 1");
  const int H = static_cast<int>(J.size()) - 1;

  IterationTrace tr;
  tr.sign = sign;
  tr.d = d;
  tr.R = R;
  tr.x0 = x0;
  tr.C = C;
  tr.norm = norm;

  // log of [1+N]^{E'} d^{-delta1} R^{-delta2}; lambda^h and J_h^{1+alpha} added per step.
  const double log_prefactor = recursion_norm_exponent(dx, profile.exponents) * std::log1p(norm) -
                               ic.delta1 * std::log(d) - ic.delta2 * std::log(R);
  const double log_lambda = std::log(ic.lambda_base);
  for (int h = 0; h <= H; ++h) {
    const LevelStep s = sequences(R, d, h);
    TraceStep st{h, s.rho, s.k, s.rho_bar, J[h], 0.0, 0.0};
    if (J[h] > 0.0) {
      const double log_structure = log_prefactor + h * log_lambda + (1.0 + ic.alpha) * std::log(J[h]);
      st.rhs = C * std::exp(log_structure);
      if (h < H && J[h + 1] > 0.0) st.c_min = std::exp(std::log(J[h + 1]) - log_structure);
    }
    tr.c_emp = std::max(tr.c_emp, st.c_min);
    tr.steps.push_back(st);
  }
  return tr;
}

IterationTrace iteration_trace(const GridFunction& u, const ExponentProfile& profile,
                               const Point& x0, double R, double d, double C, int H, int sign) {
  const DerivedExponents& dx = profile.derived;
  static_cast<void>(profile.require_constants());
  require_ball(u.grid(), x0, R);
  if (sign != 1 && sign != -1) throw std::domain_error("sign must be +1 or -1");

  const GridFunction v = sign > 0 ? u : u.scaled(-1.0);
  const double norm = quadrature_norm(cell_average(v), Exponent::finite(*dx.sigma_star),
                                      inside_ball(Ball{x0, R}));
  const std::vector<double> J = j_sequence(v, x0, R, d, profile.exponents, H);
  return trace_from_masses(J, profile, x0, R, d, norm, C, sign);
}

double calibrate_C(std::span<const IterationTrace> traces) {
  if (traces.empty()) throw std::domain_error("calibration needs at least one trace");
  double worst = 0.0;
  for (const IterationTrace& t : traces) worst = std::max(worst, t.c_emp);
  return 2.0 * worst;
}

double calibrate_from_solution(const GridFunction& u, const ExponentProfile& profile,
                               const Point& x0, double R, int H) {
  const Grid& g = u.grid();
  double sup = 0.0;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (squared_distance(g.node_point(i), x0) < R * R) sup = std::max(sup, std::abs(u[i]));
  }
  const double d = std::max(2.0, sup);
  const std::vector<IterationTrace> traces{iteration_trace(u, profile, x0, R, d, 1.0, H, 1),
                                           iteration_trace(u, profile, x0, R, d, 1.0, H, -1)};
  const double C = calibrate_C(traces);
  return C > 0.0 ? C : 1.0;
}

Certificate certify(const ModelIntegrand& m, const GridFunction& u, const Point& x0, double R,
                    const CertifyOptions& options) {
  if (!(R > 0.0) || R > 1.0) throw std::domain_error("radius must satisfy 0 < R <= 1");
  const ExponentProfile profile(m.exponents());
  const IterationConstants& ic = profile.require_constants();
  const Exponents& e = profile.exponents;
  const DerivedExponents& dx = profile.derived;
  require_ball(u.grid(), x0, R);
  if (!(options.C_cal > 0.0)) throw std::domain_error("calibration constant must be > 0");

  Certificate cert;
  cert.x0 = x0;
  cert.R = R;
  const double c0 = options.holder_constant.value_or(default_holder_constant(dx, e));
  const Ball ball{x0, R};
  const Exponent star = Exponent::finite(*dx.sigma_star);
  const double n_plus = quadrature_norm(cell_average(u), star, inside_ball(ball));
  const double n_minus = quadrature_norm(cell_average(u.scaled(-1.0)), star, inside_ball(ball));
  cert.norm = std::max(n_plus, n_minus);
  cert.d_plus = choose_d(dx, e, ic, {options.C_cal, c0, R, n_plus});
  cert.d_minus = choose_d(dx, e, ic, {options.C_cal, c0, R, n_minus});
  cert.d = std::max(cert.d_plus, cert.d_minus);

  cert.trace_plus = iteration_trace(u, profile, x0, R, cert.d, options.C_cal, options.H, 1);
  cert.trace_minus = iteration_trace(u, profile, x0, R, cert.d, options.C_cal, options.H, -1);
  auto decayed = [](const IterationTrace& t) {
    std::vector<double> J;
    for (const TraceStep& s : t.steps) J.push_back(s.J);
    return has_decayed(J);
  };
  cert.decayed = decayed(cert.trace_plus) && decayed(cert.trace_minus);

  const Grid& g = u.grid();
  const double half2 = 0.25 * R * R;
  Point x(static_cast<std::size_t>(g.dim()));
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    for (int i = 0; i < g.dim(); ++i) x[i] = g.node_coordinate(node, i);
    if (squared_distance(x, x0) < half2) {
      cert.sup_half_ball = std::max(cert.sup_half_ball, std::abs(u[node]));
    }
  }
  cert.slack = cert.d - cert.sup_half_ball;

  cert.theta1 = ic.theta1;
  cert.theta2 = ic.theta2;
  cert.d_norm_exponent = level_norm_exponent(dx, e, ic) / ic.delta1;
  const double log_composite =
      (std::log(options.C_cal) + ic.alpha * std::log(c0) + std::log(ic.lambda_base) / ic.alpha) /
      ic.delta1;
  cert.composite_constant = std::max(2.0, std::exp(log_composite));
  cert.rhs_bound = cert.composite_constant * std::pow(R, -cert.theta2) *
                   std::pow(1.0 + cert.norm, cert.theta1);
  cert.valid = cert.decayed && cert.slack >= 0.0 && cert.d <= cert.rhs_bound * (1.0 + 1e-6);
  return cert;
}

void write_certificate_csv(std::ostream& os, const std::vector<Certificate>& certificates) {
  os << "x0,R,d,sup_half_ball,slack,theta1,theta2,rhs_bound,valid\n";
  for (const Certificate& c : certificates) {
    os << join17(c.x0, ' ') << ',' << fmt17(c.R) << ',' << fmt17(c.d) << ','
       << fmt17(c.sup_half_ball) << ',' << fmt17(c.slack) << ',' << fmt17(c.theta1) << ','
       << fmt17(c.theta2) << ',' << fmt17(c.rhs_bound) << ',' << (c.valid ? 1 : 0) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const std::vector<IterationTrace>& traces) {
  os << "sign,h,rho,k,rho_bar,J,rhs,c_min\n";
  for (const IterationTrace& t : traces) {
    for (const TraceStep& s : t.steps) {
      os << t.sign << ',' << s.h << ',' << fmt17(s.rho) << ',' << fmt17(s.k) << ','
         << fmt17(s.rho_bar) << ',' << fmt17(s.J) << ',' << fmt17(s.rhs) << ',' << fmt17(s.c_min)
         << '\n';
    }
  }
}

}  // namespace anisobound
