#include "anisobound/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "anisobound/format.hpp"

namespace anisobound {

Exponent Exponent::finite(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("finite exponent expected, got " + fmt17(value));
  }
  Exponent e;
  e.value_ = value;
  return e;
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return infinity();
  double v = 0.0;
  try {
    v = parse_double(text);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not an exponent: '" + text + "'");
  }
  return finite(v);
}

double Exponent::value() const {
  if (infinite_) throw std::domain_error("value() of an infinite exponent");
  return value_;
}

std::string Exponent::to_string() const { return infinite_ ? "inf" : fmt17(value_); }

Exponents::Exponents(int n, std::vector<double> p, double q, double gamma,
                     std::vector<Exponent> r, Exponent s)
    : n_(n), p_(std::move(p)), q_(q), gamma_(gamma), r_(std::move(r)), s_(s) {
  if (n_ < 1) throw std::invalid_argument("dimension must be >= 1");
  if (static_cast<int>(p_.size()) != n_ || static_cast<int>(r_.size()) != n_) {
    throw std::invalid_argument("p and r must have exactly n entries");
  }
  if (!std::isfinite(q_) || !std::isfinite(gamma_)) {
    throw std::invalid_argument("q and gamma must be finite");
  }
  for (int i = 0; i < n_; ++i) {
    const double pi = p_[i];
    if (!std::isfinite(pi) || !(pi > 1.0)) {
      throw std::invalid_argument("p_" + std::to_string(i + 1) + " must be > 1");
    }
    if (pi > q_) {
      throw std::invalid_argument("p_" + std::to_string(i + 1) + " exceeds q");
    }
    if (r_[i].is_finite() && !(r_[i].value() >= 1.0)) {
      throw std::invalid_argument("r_" + std::to_string(i + 1) + " must be >= 1");
    }
  }
  if (q_ > gamma_) throw std::invalid_argument("q exceeds gamma");
  if (s_.is_finite() && !(s_.value() > 1.0)) throw std::invalid_argument("s must be > 1");
}

Exponents Exponents::isotropic(int n, double p, double q, double gamma, Exponent r,
                               Exponent s) {
  return Exponents(n, std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), p), q,
                   gamma, std::vector<Exponent>(static_cast<std::size_t>(std::max(n, 0)), r),
                   s);
}

Exponent conjugate_exponent(Exponent beta) {
  if (beta.is_infinite()) return Exponent::finite(1.0);
  const double b = beta.value();
  if (!(b >= 1.0)) throw std::domain_error("conjugate exponent needs beta >= 1");
  if (b == 1.0) return Exponent::infinity();
  return Exponent::finite(b / (b - 1.0));
}

Exponent harmonic_mean(std::span<const Exponent> betas) {
  if (betas.empty()) throw std::domain_error("harmonic mean of an empty list");
  double sum = 0.0;
  for (const Exponent& b : betas) {
    if (b.is_finite() && !(b.value() >= 1.0)) {
      throw std::domain_error("harmonic mean needs exponents >= 1");
    }
    sum += b.reciprocal();
  }
  if (sum == 0.0) return Exponent::infinity();
  return Exponent::finite(static_cast<double>(betas.size()) / sum);
}

double harmonic_mean(std::span<const double> betas) {
  if (betas.empty()) throw std::domain_error("harmonic mean of an empty list");
  double sum = 0.0;
  for (double b : betas) {
    if (!(b > 0.0)) throw std::domain_error("harmonic mean needs positive entries");
    sum += 1.0 / b;
  }
  return static_cast<double>(betas.size()) / sum;
}

double sobolev_star(double beta_bar, int n) {
  if (!(beta_bar >= 1.0)) throw std::domain_error("Sobolev exponent needs beta >= 1");
  if (!(beta_bar < n)) {
    throw std::domain_error("Sobolev exponent needs beta < n (got beta=" + fmt17(beta_bar) +
                            ", n=" + std::to_string(n) + ")");
  }
  return n * beta_bar / (n - beta_bar);
}

DerivedExponents derive(const Exponents& e) {
  DerivedExponents d;
  const int n = e.n();
  d.sigma.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d.sigma[i] = e.p()[i] * e.r()[i].ratio_to_successor();
  d.sigma_bar = harmonic_mean(std::span<const double>(d.sigma));
  d.p_bar = harmonic_mean(std::span<const double>(e.p()));
  // Harmonic averages of sigma_i < 1 are allowed here; the Sobolev formula is
  // applied as printed whenever sigma_bar < n.
  if (d.sigma_bar < n) d.sigma_star = n * d.sigma_bar / (n - d.sigma_bar);
  d.s_prime = conjugate_exponent(e.s()).value();
  return d;
}

AdmissibilityReport check_admissibility(const DerivedExponents& d, const Exponents& e) {
  AdmissibilityReport rep;
  rep.dimension_below = e.n() >= 2 && d.sigma_bar < e.n();
  if (!d.sigma_star) return rep;
  const double ss = *d.sigma_star;
  const double q = e.q();
  const double sp = d.s_prime;
  rep.q_below = q < ss / sp;
  rep.gamma_upper = (ss / sp) * (d.p_bar / q) + q - d.p_bar;
  rep.gamma_range_nonempty = *rep.gamma_upper > q;
  rep.gamma_below = q <= e.gamma() && e.gamma() < *rep.gamma_upper;
  return rep;
}

namespace {

// Distance from gamma to the admissible upper bound. Both D = p_bar sigma_star
// - q s' (gamma - q + p_bar) and delta1 are multiples of it, so evaluating them
// through the same factor keeps theta2 = delta2/delta1 exact to rounding even
// when gamma sits close to the bound.
double gamma_gap(const DerivedExponents& d, const Exponents& e) {
  const AdmissibilityReport rep = check_admissibility(d, e);
  if (!rep.admissible()) throw std::domain_error("exponents are not admissible");
  return *rep.gamma_upper - e.gamma();
}

}  // namespace

ThetaExponents theta_exponents(const DerivedExponents& d, const Exponents& e) {
  const double gap = gamma_gap(d, e);
  const double ss = *d.sigma_star;
  const double q = e.q();
  const double sp = d.s_prime;
  const double denom = q * sp * gap;
  ThetaExponents t;
  t.theta1 = (ss * e.gamma() - q * sp * d.p_bar) / denom;
  t.theta2 = ss / (sp * gap);
  return t;
}

IterationConstants iteration_constants(const DerivedExponents& d, const Exponents& e) {
  const double gap = gamma_gap(d, e);
  const double ss = *d.sigma_star;
  const double q = e.q();
  const double g = e.gamma();
  const double sp = d.s_prime;
  const double pb = d.p_bar;

  IterationConstants c;
  c.delta2 = q * q * sp / pb;
  c.lambda_base = std::pow(8.0, c.delta2);
  // Expanded, delta1 = q s'{1 - q s'/sigma_star + q^2 s'/(p_bar sigma_star) - gamma q s'/(p_bar sigma_star)}.
  c.delta1 = (q * q * sp * sp / (pb * ss)) * gap;
  c.alpha = (q / pb) * (1.0 + (q - pb) * sp / ss - g * sp / ss);
  c.theta = 1.0 - (g - q) * sp / ss;
  const ThetaExponents t = theta_exponents(d, e);
  c.theta1 = t.theta1;
  c.theta2 = t.theta2;
  return c;
}

double recursion_norm_exponent(const DerivedExponents& d, const Exponents& e) {
  if (!d.sigma_star) throw std::domain_error("sigma_star undefined");
  const double q = e.q();
  const double sp = d.s_prime;
  return (q / d.p_bar) * (e.gamma() - q) * sp * (1.0 + q * sp / *d.sigma_star);
}

double level_norm_exponent(const DerivedExponents& d, const Exponents& e,
                           const IterationConstants& c) {
  return recursion_norm_exponent(d, e) + e.q() * d.s_prime * c.alpha;
}

double unit_ball_volume(int n) {
  if (n < 1) throw std::domain_error("unit ball volume needs n >= 1");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double default_holder_constant(const DerivedExponents& d, const Exponents& e) {
  if (!d.sigma_star) throw std::domain_error("sigma_star undefined");
  return std::pow(unit_ball_volume(e.n()), 1.0 - e.q() * d.s_prime / *d.sigma_star);
}

double choose_d(const DerivedExponents& d, const Exponents& e, const IterationConstants& c,
                const LevelChoice& choice) {
  if (!(choice.radius > 0.0) || choice.radius > 1.0) {
    throw std::domain_error("level choice needs 0 < R <= 1");
  }
  if (!(choice.norm >= 0.0)) throw std::domain_error("norm must be >= 0");
  if (!(choice.calibration > 0.0) || !(choice.holder_constant > 0.0)) {
    throw std::domain_error("calibration and Holder constants must be positive");
  }
  const double E = level_norm_exponent(d, e, c);
  // Evaluated in log space: lambda^(1/alpha) overflows quickly for small alpha.
  const double log_inner = std::log(choice.calibration) +
                           c.alpha * std::log(choice.holder_constant) +
                           std::log(c.lambda_base) / c.alpha -
                           c.delta2 * std::log(choice.radius) + E * std::log1p(choice.norm);
  return std::max(2.0, std::exp(log_inner / c.delta1));
}

ExponentProfile::ExponentProfile(Exponents e)
    : exponents(std::move(e)),
      derived(derive(exponents)),
      admissibility(check_admissibility(derived, exponents)) {
  if (admissibility.admissible()) constants = iteration_constants(derived, exponents);
}

const IterationConstants& ExponentProfile::require_constants() const {
  if (!constants) throw std::domain_error("exponents are not admissible");
  return *constants;
}

}  // namespace anisobound
