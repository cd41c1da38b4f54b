#pragma once

// Level-set iteration engine: radii/level sequences, super-level masses J_h,
// the two real-analysis lemmas (hole filling, fast geometric convergence),
// calibration of the recursion constant, and L-infinity certificates.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "anisobound/exponents.hpp"
#include "anisobound/grid.hpp"
#include "anisobound/integrand.hpp"

namespace anisobound {

struct LevelStep {
  double rho = 0.0;      // (R/2)(1 + 2^-h)
  double k = 0.0;        // d (1 - 2^-(h+1))
  double rho_bar = 0.0;  // (R/2)(1 + 3/(4 2^h))
};

/// Throws std::domain_error for d < 2, R <= 0 or h < 0.
LevelStep sequences(double R, double d, int h);

/// J_h = int_{A_{k_h, rho_h}} (u - k_h)^{qs'} for h = 0..H (H+1 values).
std::vector<double> j_sequence(const GridFunction& u, const Point& x0, double R, double d,
                               const Exponents& e, int H);

// ---------------------------------------------------------------------------
// Hole filling.

struct Sample {
  double t = 0.0;
  double phi = 0.0;
};

/// C(theta, alpha) from the geometric interpolation t_{i+1} = t_i + (1-tau) tau^i (R-rho)
/// with tau^alpha = (1+theta)/2: (1-tau)^{-alpha} (1+theta)/(1-theta).
double hole_filling_constant(double theta, double alpha);

struct HoleFillingReport {
  bool hypothesis_holds = false;
  /// max over sampled s < t of phi(s) - theta phi(t) - A/(t-s)^alpha - B.
  double worst_hypothesis_excess = 0.0;
  double c_standard = 0.0;
  double lhs = 0.0;            // phi(rho)
  double rhs_structure = 0.0;  // A/(R-rho)^alpha + B
  double c_emp = 0.0;
  bool passed = false;  // hypothesis holds and c_emp <= c_standard
};

/// Samples must be sorted by t with phi >= 0; rho and R must be sample
/// abscissae with rho < R (std::domain_error otherwise). The conclusion is
/// evaluated only when the hypothesis holds on every sampled pair.
HoleFillingReport hole_filling(std::span<const Sample> phi, double theta, double A, double B,
                               double alpha, double rho, double R);

// ---------------------------------------------------------------------------
// Fast geometric convergence.

struct FastConvergenceReport {
  bool applicable = false;   // J0 <= A^{-1/alpha} lambda^{-1/alpha^2}
  double threshold = 0.0;
  std::vector<double> J;       // J_0..J_H from J_{h+1} = A lambda^h J_h^{1+alpha}
  std::vector<double> bounds;  // lambda^{-h/alpha} J_0
  bool bound_holds = false;    // J_h <= bounds_h (1 + 1e-12) for all h
  bool decayed = false;        // J_H <= 1e-10 J_0 (or J_0 = 0)
};

FastConvergenceReport fast_convergence(double J0, double A, double lambda, double alpha, int H);

// ---------------------------------------------------------------------------
// Traces, calibration and certificates.

struct TraceStep {
  int h = 0;
  double rho = 0.0;
  double k = 0.0;
  double rho_bar = 0.0;
  double J = 0.0;
  /// C [1+N]^{E'} d^{-delta1} R^{-delta2} lambda^h J_h^{1+alpha}: the bound on J_{h+1}.
  double rhs = 0.0;
  /// Minimal C for which J_{h+1} <= rhs holds (0 on the last step or when J_{h+1} = 0).
  double c_min = 0.0;
};

struct IterationTrace {
  int sign = 1;  // +1 traces u, -1 traces -u
  double d = 0.0;
  double R = 0.0;
  Point x0;
  double norm = 0.0;  // ||u||_{L^{sigma_star}(B_R)}
  double C = 1.0;
  std::vector<TraceStep> steps;
  double c_emp = 0.0;  // max c_min
};

/// Per-step diagnostics for a given mass sequence J_0..J_H and norm N.
IterationTrace trace_from_masses(std::span<const double> J, const ExponentProfile& profile,
                                 const Point& x0, double R, double d, double norm, double C,
                                 int sign);

/// Requires admissible exponents, B_R(x0) inside the grid and 0 < R <= 1.
IterationTrace iteration_trace(const GridFunction& u, const ExponentProfile& profile,
                               const Point& x0, double R, double d, double C, int H, int sign);

/// 2 * max c_emp over all traces; std::domain_error on empty input. Returns 0
/// when every trace is identically zero.
double calibrate_C(std::span<const IterationTrace> traces);

/// Fits C on the traces of u and -u started at d = max(2, sup_{B_R}|u|) with
/// C = 1. Returns 1 when both traces vanish identically.
double calibrate_from_solution(const GridFunction& u, const ExponentProfile& profile,
                               const Point& x0, double R, int H);

struct CertifyOptions {
  double C_cal = 1.0;
  int H = 40;
  std::optional<double> holder_constant;  // defaults to |B_1|^{1 - qs'/sigma_star}
};

struct Certificate {
  Point x0;
  double R = 0.0;
  double norm = 0.0;
  double d = 0.0;
  double d_plus = 0.0;   // level chosen for u
  double d_minus = 0.0;  // level chosen for -u
  double sup_half_ball = 0.0;
  double slack = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  /// Exponent of (1+N) in d, i.e. E/delta1; equals theta1.
  double d_norm_exponent = 0.0;
  double composite_constant = 0.0;  // max(2, (C c0^alpha lambda^{1/alpha})^{1/delta1})
  double rhs_bound = 0.0;           // composite R^{-theta2} (1+N)^{theta1}
  bool decayed = false;
  bool valid = false;
  IterationTrace trace_plus;
  IterationTrace trace_minus;
};

/// Runs the full pipeline for u and -u. std::domain_error on R outside (0,1],
/// inadmissible exponents or a ball leaving the grid.
Certificate certify(const ModelIntegrand& m, const GridFunction& u, const Point& x0, double R,
                    const CertifyOptions& options);

/// Header "x0,R,d,sup_half_ball,slack,theta1,theta2,rhs_bound,valid" + one row.
void write_certificate_csv(std::ostream& os, const std::vector<Certificate>& certificates);
/// Header "sign,h,rho,k,rho_bar,J,rhs,c_min" + one row per step.
void write_trace_csv(std::ostream& os, const std::vector<IterationTrace>& traces);

}  // namespace anisobound
