#pragma once

// Discrete minimizers of the model energy with Dirichlet data, and the
// quasi-minimality check F(u; supp phi) <= Q F(u + phi; supp phi).

#include <cstdint>
#include <optional>
#include <vector>

#include "anisobound/grid.hpp"
#include "anisobound/integrand.hpp"

namespace anisobound {

struct StepRule {
  double initial_step = 1.0;
  double shrink = 0.5;      // in (0, 1)
  double armijo = 1e-4;     // sufficient-decrease constant in (0, 1)
};

enum class Descent { steepest, conjugate_gradient };

struct SolveConfig {
  int max_iters = 20000;
  /// Bound on the sup-norm of the energy gradient divided by h^n (the
  /// discrete Euler-Lagrange residual) over interior nodes.
  double grad_tol = 1e-9;
  StepRule step;
  /// (t^2 + eps^2)^{p/2} - eps^p replaces |t|^p for exponents below 2;
  /// defaults to h^2.
  std::optional<double> smoothing_eps;
  Descent descent = Descent::conjugate_gradient;
};

/// Throws std::invalid_argument on non-positive tolerances or a bad step rule.
void validate(const SolveConfig& cfg);

struct SolveResult {
  GridFunction u;
  double final_energy = 0.0;  // smoothed discrete energy of u
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> energy_history;  // accepted iterates, starting with the initial guess
};

/// Minimizes the smoothed discrete energy over interior nodes. `start`
/// carries the Dirichlet data on boundary nodes and the initial guess inside.
/// Non-convergence is reported through SolveResult::converged.
SolveResult solve(const ModelIntegrand& m, const GridFunction& start, const SolveConfig& cfg);

/// Smoothed energy and its nodal gradient (boundary entries zeroed).
double smoothed_energy(const ModelIntegrand& m, const CellWeights& w, const GridFunction& u,
                       double eps, std::vector<double>* gradient);

/// Closed-form Dirichlet data.
class BoundaryFunction {
 public:
  /// c0 + sum_i a_i x_i.
  static BoundaryFunction affine(double c0, std::vector<double> a);
  /// offset + amplitude |x - center|^exponent.
  static BoundaryFunction radial(Point center, double amplitude, double exponent, double offset);
  /// offset + amplitude prod_i (x_i - center_i).
  static BoundaryFunction product(Point center, double amplitude, double offset);

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] int dim() const;

 private:
  enum class Kind { affine, radial, product };
  Kind kind_ = Kind::affine;
  double c0_ = 0.0;
  std::vector<double> coeffs_;
  double amplitude_ = 0.0;
  double exponent_ = 1.0;
};

enum class InitialGuess { zero, extension };

/// Boundary nodes take g; interior nodes take 0 (zero) or g (extension).
GridFunction dirichlet_start(const Grid& grid, const BoundaryFunction& g, InitialGuess initial);

struct QuasiminimalityCheck {
  double lhs = 0.0;  // F(u; supp phi)
  double rhs = 0.0;  // F(u + phi; supp phi)
  bool passed = true;
};

struct QuasiminimalityReport {
  std::vector<QuasiminimalityCheck> checks;
  std::size_t failures = 0;
  /// max lhs/rhs over checks with rhs > 0 (1 when no such check).
  double empirical_q = 1.0;
};

/// Each phi must vanish on boundary nodes (std::invalid_argument otherwise).
/// supp phi is the set of cells with a corner where phi is nonzero.
QuasiminimalityReport verify_quasiminimality(const ModelIntegrand& m, const GridFunction& u,
                                             double Q, std::span<const GridFunction> perturbations);

/// Seeded random perturbations: uniform values in [-amplitude, amplitude] on
/// a random sub-box of interior nodes.
std::vector<GridFunction> random_perturbations(const Grid& grid, std::size_t count,
                                               std::uint64_t seed, double amplitude);

}  // namespace anisobound
