#pragma once

// Empirical checks of the functional inequalities behind the boundedness
// argument. Each check reports both sides and the minimal constant
// c_emp = lhs / rhs_structure that would make it hold on the given data.

#include <iosfwd>
#include <string>
#include <vector>

#include "anisobound/exponents.hpp"
#include "anisobound/grid.hpp"
#include "anisobound/integrand.hpp"

namespace anisobound {

struct InequalityReport {
  std::string check;
  std::string parameters;  // ';'-separated key=value echo
  double lhs = 0.0;
  double rhs_structure = 0.0;
  double c_emp = 0.0;  // 0 if lhs = 0; inf if rhs = 0 < lhs
  bool passed = true;
};

/// lhs / rhs with the conventions above.
double empirical_constant(double lhs, double rhs);

/// Discrete L^beta quantity (sum |f|^beta h^n)^(1/beta) for any beta > 0
/// (sigma_i may drop below one); max |f| for beta = inf.
double quadrature_norm(const CellField& f, Exponent beta, const Region& region);

/// ||lambda^{-1}||_{L^r(region)} over cell centres.
double inverse_weight_norm(const std::vector<double>& lambda_cells, const Grid& grid,
                           Exponent r, const Region& region);

/// (1/n) sum_i ||lambda_i^{-1}||^{-1}_{L^{r_i}} ||u_{x_i}||^{p_i}_{L^{sigma_i}}
/// against F(u; sub_box). Passes when c_emp <= 1 + 1e-9. The sub-box must lie
/// strictly inside the grid box (std::domain_error).
InequalityReport verify_lower_bound(const ModelIntegrand& m, const GridFunction& u,
                                    const std::vector<Interval>& sub_box);

/// ||u||_{L^{sigma_star}} against (prod_i ||u_{x_i}||_{L^{sigma_i}})^{1/n} for u
/// vanishing on the grid boundary. Passes when c_emp is finite.
InequalityReport verify_embedding(const GridFunction& u, const DerivedExponents& d);

/// Weighted Poincare-Sobolev form over the whole grid (v vanishing on the
/// boundary). Passes when c_emp is finite.
InequalityReport verify_poincare_sobolev(const ModelIntegrand& m, const GridFunction& v,
                                         const DerivedExponents& d);

/// lambda_i <= 2 mu~ at every cell centre. c_emp is the worst lambda_i/(2 mu~).
InequalityReport verify_weight_domination(const ModelIntegrand& m, const Grid& grid);

struct CaccioppoliParams {
  double k = 1.0;
  double rho = 0.0;
  double R = 0.0;
  Point x0;
};

/// Energy on A_{k,rho} against
///   (R-rho)^{-q} int_{A_{k,R}} mu~((u-k)^q + k^gamma) + ||mu~||_{L^s(B_R)} |A_{k,R}|^{1/s'}.
/// Needs 0 < rho < R, k >= 1 and B_R(x0) inside the grid (std::domain_error).
InequalityReport verify_caccioppoli(const ModelIntegrand& m, const GridFunction& u,
                                    const CaccioppoliParams& params);

/// ||u||_{L^{qs'}(ball)} by cell quadrature.
double higher_integrability_norm(const GridFunction& u, const Exponents& e,
                                 const DerivedExponents& d, const Ball& ball);

/// u times prod_i 4 (x_i - lo_i)(hi_i - x_i)/(hi_i - lo_i)^2; vanishes on the
/// grid boundary.
GridFunction bump_cutoff(const GridFunction& u);

/// Header "check,parameters,lhs,rhs_structure,c_emp" then one row per report.
void write_reports_csv(std::ostream& os, const std::vector<InequalityReport>& reports);

}  // namespace anisobound
