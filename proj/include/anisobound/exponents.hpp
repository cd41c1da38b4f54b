#pragma once

// Exponent calculus for anisotropic p_i,q-growth functionals: conjugate and
// Sobolev exponents, harmonic averages, the admissibility conditions for local
// boundedness, and the closed-form constants driving the level-set iteration.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anisobound {

/// An integrability exponent in [1, inf] with an explicit infinity tag.
/// Formulas never rely on floating-point infinity arithmetic.
class Exponent {
 public:
  constexpr Exponent() = default;

  static Exponent finite(double value);
  static constexpr Exponent infinity() {
    Exponent e;
    e.infinite_ = true;
    return e;
  }

  /// Accepts a decimal literal or "inf".
  static Exponent parse(const std::string& text);

  [[nodiscard]] constexpr bool is_infinite() const { return infinite_; }
  [[nodiscard]] constexpr bool is_finite() const { return !infinite_; }

  /// Throws std::domain_error for the infinite exponent.
  [[nodiscard]] double value() const;

  /// 1/beta with the convention 1/inf = 0.
  [[nodiscard]] double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }

  /// beta/(beta+1) with the convention inf/(inf+1) = 1.
  [[nodiscard]] double ratio_to_successor() const {
    return infinite_ ? 1.0 : value_ / (value_ + 1.0);
  }

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 1.0;
  bool infinite_ = false;
};

/// Raw exponent data of the growth hypotheses: 1 < p_i <= q <= gamma,
/// r_i >= 1, s > 1. Validated at construction.
class Exponents {
 public:
  Exponents(int n, std::vector<double> p, double q, double gamma,
            std::vector<Exponent> r, Exponent s);

  /// Isotropic convenience: p_i = p for all i, r_i = r for all i.
  static Exponents isotropic(int n, double p, double q, double gamma, Exponent r,
                             Exponent s);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const std::vector<double>& p() const { return p_; }
  [[nodiscard]] double q() const { return q_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] const std::vector<Exponent>& r() const { return r_; }
  [[nodiscard]] Exponent s() const { return s_; }

 private:
  int n_;
  std::vector<double> p_;
  double q_;
  double gamma_;
  std::vector<Exponent> r_;
  Exponent s_;
};

struct DerivedExponents {
  std::vector<double> sigma;         // sigma_i = p_i r_i / (r_i + 1)
  double sigma_bar = 0.0;            // harmonic average of sigma
  std::optional<double> sigma_star;  // n sigma_bar / (n - sigma_bar), when sigma_bar < n
  double p_bar = 0.0;                // harmonic average of p
  double s_prime = 1.0;              // conjugate of s (finite since s > 1)
};

struct AdmissibilityReport {
  bool dimension_below = false;   // (i)   sigma_bar < n
  bool q_below = false;           // (ii)  q < sigma_star / s'
  bool gamma_below = false;       // (iii) q <= gamma < gamma_upper
  std::optional<double> gamma_upper;
  /// gamma_upper > q; guaranteed whenever (ii) holds.
  bool gamma_range_nonempty = false;

  [[nodiscard]] bool admissible() const { return dimension_below && q_below && gamma_below; }
};

struct ThetaExponents {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct IterationConstants {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double alpha = 0.0;
  double lambda_base = 0.0;  // 8^(q^2 s' / p_bar)
  double theta = 0.0;        // 1 - (gamma - q) s' / sigma_star
  double theta1 = 0.0;
  double theta2 = 0.0;
};

Exponent conjugate_exponent(Exponent beta);
Exponent harmonic_mean(std::span<const Exponent> betas);
double harmonic_mean(std::span<const double> betas);
double sobolev_star(double beta_bar, int n);

DerivedExponents derive(const Exponents& e);
AdmissibilityReport check_admissibility(const DerivedExponents& d, const Exponents& e);

/// Throws std::domain_error unless the data are admissible.
ThetaExponents theta_exponents(const DerivedExponents& d, const Exponents& e);
IterationConstants iteration_constants(const DerivedExponents& d, const Exponents& e);

/// Exponent of [1 + ||u||] in the one-step recursion of the level-set
/// masses: (q/p_bar)(gamma - q) s' (1 + q s'/sigma_star).
double recursion_norm_exponent(const DerivedExponents& d, const Exponents& e);

/// Exponent of [1 + ||u||] inside the braces of the level choice:
/// recursion_norm_exponent + q s' alpha.
double level_norm_exponent(const DerivedExponents& d, const Exponents& e,
                           const IterationConstants& c);

double unit_ball_volume(int n);

/// |B_1|^(1 - q s'/sigma_star): the Holder constant relating the L^{qs'} and
/// L^{sigma_star} norms on balls of radius at most one.
double default_holder_constant(const DerivedExponents& d, const Exponents& e);

struct LevelChoice {
  double calibration = 1.0;     // C_cal
  double holder_constant = 1.0; // c0
  double radius = 1.0;          // R in (0, 1]
  double norm = 0.0;            // ||u||_{L^sigma_star(B_R)}
};

/// d = max(2, {C c0^alpha lambda^(1/alpha) R^(-delta2) (1+N)^E}^(1/delta1)).
double choose_d(const DerivedExponents& d, const Exponents& e, const IterationConstants& c,
                const LevelChoice& choice);

/// Everything computable from the raw exponents in one place.
struct ExponentProfile {
  Exponents exponents;
  DerivedExponents derived;
  AdmissibilityReport admissibility;
  std::optional<IterationConstants> constants;  // present iff admissible

  explicit ExponentProfile(Exponents e);

  /// Throws std::domain_error when inadmissible.
  [[nodiscard]] const IterationConstants& require_constants() const;
};

}  // namespace anisobound
