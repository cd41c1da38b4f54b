#pragma once

// Separable model integrand
//   f(x, u, xi) = sum_i lambda_i(x) |xi_i|^{p_i} + u_coeff mu(x) |u|^gamma
// with constant or power-law weights, its growth sandwich and convexity
// checks, and cell quadrature of the energy F(u; region).

#include <optional>
#include <span>
#include <vector>

#include "anisobound/exponents.hpp"
#include "anisobound/grid.hpp"

namespace anisobound {

/// constant: value.  power: amplitude * |x - center|^exponent.
class WeightField {
 public:
  enum class Kind { constant, power };

  static WeightField constant(double value);
  static WeightField power(double amplitude, Point center, double exponent);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] const Point& center() const { return center_; }
  [[nodiscard]] double exponent() const { return exponent_; }

  /// Pointwise value; may be +inf at the centre of a singular power weight.
  [[nodiscard]] double at(std::span<const double> x) const;
  /// Value at a cell centre; a centre coinciding with the singular point is
  /// shifted by h/2 along the first axis.
  [[nodiscard]] double at_cell(std::span<const double> x, double h) const;

 private:
  Kind kind_ = Kind::constant;
  double amplitude_ = 1.0;
  Point center_;
  double exponent_ = 0.0;
};

class ModelIntegrand {
 public:
  /// Validates nonnegativity, lambda_i^{-1} in L^{r_i} and mu~ in L^s for the
  /// power family. Throws std::invalid_argument.
  ModelIntegrand(Exponents exponents, std::vector<WeightField> lambdas, WeightField mu,
                 double u_coeff);

  [[nodiscard]] const Exponents& exponents() const { return exponents_; }
  [[nodiscard]] const std::vector<WeightField>& lambdas() const { return lambdas_; }
  [[nodiscard]] const WeightField& mu() const { return mu_; }
  [[nodiscard]] double u_coeff() const { return u_coeff_; }
  [[nodiscard]] int dim() const { return exponents_.n(); }

  /// Replaces the effective upper weight mu~; only meant for building
  /// deliberately inconsistent models in checks.
  [[nodiscard]] ModelIntegrand with_upper_weight_override(WeightField w) const;
  [[nodiscard]] const std::optional<WeightField>& upper_weight_override() const {
    return upper_override_;
  }

  /// f(x, u, xi) >= 0.
  [[nodiscard]] double eval(std::span<const double> x, double u,
                            std::span<const double> xi) const;
  /// mu~(x) = sum_i lambda_i(x) + u_coeff mu(x), unless overridden.
  [[nodiscard]] double upper_weight(std::span<const double> x) const;

 private:
  Exponents exponents_;
  std::vector<WeightField> lambdas_;
  WeightField mu_;
  double u_coeff_;
  std::optional<WeightField> upper_override_;
};

double eval_integrand(const ModelIntegrand& m, std::span<const double> x, double u,
                      std::span<const double> xi);

/// Weights sampled once per cell centre of a grid.
struct CellWeights {
  std::vector<std::vector<double>> lambda;  // [axis][cell]
  std::vector<double> mu;                   // [cell]
  std::vector<double> upper;                // mu~ [cell]
};

CellWeights sample_weights(const ModelIntegrand& m, const Grid& grid);

struct GrowthSample {
  Point x;
  double u = 0.0;
  std::vector<double> xi;
};

struct SandwichReport {
  std::size_t samples = 0;
  /// max of sum_i lambda_i |xi_i|^{p_i} - f; <= 0 when the lower bound holds.
  double max_lower_violation = 0.0;
  /// max of f - mu~ (|xi|^q + |u|^gamma + 1); <= 0 when the upper bound holds.
  double max_upper_violation = 0.0;
  [[nodiscard]] bool holds() const {
    return max_lower_violation <= 0.0 && max_upper_violation <= 0.0;
  }
};

SandwichReport check_growth(const ModelIntegrand& m, std::span<const GrowthSample> samples);

struct ConvexitySample {
  Point x;
  double u_a = 0.0;
  std::vector<double> xi_a;
  double u_b = 0.0;
  std::vector<double> xi_b;
};

struct ConvexityReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// max of f(midpoint) - (f(a) + f(b))/2.
  double max_excess = 0.0;
};

/// Midpoint convexity in (u, xi) at a common x, with tolerance 1e-12 (1 + |mean|).
ConvexityReport check_convexity(const ModelIntegrand& m, std::span<const ConvexitySample> pairs);

/// sum over cells in region of f(x_c, avg u, Du) h^n.
double energy(const ModelIntegrand& m, const GridFunction& u, const Region& region);
double energy(const ModelIntegrand& m, const CellWeights& w, const GridFunction& u,
              const Region& region);

/// Cellwise f(x_c, avg u, Du) (unweighted by h^n).
CellField integrand_density(const ModelIntegrand& m, const CellWeights& w, const GridFunction& u);

}  // namespace anisobound
