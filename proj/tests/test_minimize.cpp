#include <cmath>
#include <cstring>
#include <stdexcept>

#include "anisobound/minimize.hpp"
#include "doctest.h"

using namespace anisobound;
using doctest::Approx;

namespace {

const Exponent kInf = Exponent::infinity();

Grid unit_box(int n, double h) { return make_grid(std::vector<Interval>(n, {0.0, 1.0}), h); }

ModelIntegrand laplace(int n) {
  return ModelIntegrand(Exponents::isotropic(n, 2, 2, 2, kInf, kInf),
                        std::vector<WeightField>(n, WeightField::constant(1)),
                        WeightField::constant(1), 0.0);
}

double sup_error(const GridFunction& u, double (*exact)(std::span<const double>)) {
  double err = 0.0;
  for (std::size_t i = 0; i < u.grid().num_nodes(); ++i)
    err = std::max(err, std::abs(u[i] - exact(u.grid().node_point(i))));
  return err;
}

}  // namespace

TEST_CASE("solver configuration") {
  SolveConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.step.shrink = 1.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.grad_tol = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.smoothing_eps = -1.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("boundary functions") {
  const auto a = BoundaryFunction::affine(1.0, {2.0, -1.0});
  CHECK(a(std::vector<double>{0.5, 0.25}) == Approx(1.75));
  CHECK(a.dim() == 2);
  const auto r = BoundaryFunction::radial({0.5, 0.5}, 2.0, 2.0, 1.0);
  CHECK(r(std::vector<double>{1.0, 0.5}) == Approx(1.5));
  const auto p = BoundaryFunction::product({0.5, 0.5}, 4.0, 0.0);
  CHECK(p(std::vector<double>{1.0, 0.0}) == Approx(-1.0));

  const Grid g = unit_box(2, 0.25);
  const auto z = dirichlet_start(g, a, InitialGuess::zero);
  const auto e = dirichlet_start(g, a, InitialGuess::extension);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const double expect = a(g.node_point(i));
    if (g.is_boundary_node(i)) {
      CHECK(z[i] == expect);
    } else {
      CHECK(z[i] == 0.0);
    }
    CHECK(e[i] == expect);
  }
}

TEST_CASE("1-D Dirichlet energy gives the affine interpolant") {
  const auto m = laplace(1);
  const Grid g = unit_box(1, 1.0 / 64);
  const auto start = dirichlet_start(g, BoundaryFunction::affine(0.0, {1.0}), InitialGuess::zero);
  const auto res = solve(m, start, {});
  CHECK(res.converged);
  CHECK(res.residual <= 1e-9);
  CHECK(sup_error(res.u, [](std::span<const double> x) { return x[0]; }) < 1e-8);
  CHECK(res.final_energy == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("1-D weighted problem approaches sqrt(x)") {
  const double h = 1.0 / 256;
  const Exponents e = Exponents::isotropic(1, 2, 2, 2, Exponent::finite(1.5), kInf);
  const ModelIntegrand m(e, {WeightField::power(1.0, {0.0}, 0.5)}, WeightField::constant(1), 0.0);
  const Grid g = unit_box(1, h);
  const auto start = dirichlet_start(g, BoundaryFunction::affine(0.0, {1.0}), InitialGuess::zero);
  const auto res = solve(m, start, {});
  CHECK(res.converged);
  CHECK(sup_error(res.u, [](std::span<const double> x) { return std::sqrt(x[0]); }) < 5 * h);
}

TEST_CASE("2-D harmonic affine extension") {
  const auto m = laplace(2);
  const Grid g = unit_box(2, 1.0 / 16);
  const auto start = dirichlet_start(g, BoundaryFunction::affine(0.0, {1.0, 0.0}), InitialGuess::zero);
  for (Descent d : {Descent::conjugate_gradient, Descent::steepest}) {
    SolveConfig cfg;
    cfg.descent = d;
    cfg.max_iters = 100000;
    const auto res = solve(m, start, cfg);
    CHECK(res.converged);
    CHECK(sup_error(res.u, [](std::span<const double> x) { return x[0]; }) < 1e-8);
  }
}

TEST_CASE("energy decreases monotonically and runs are deterministic") {
  const Exponents e(2, {1.5, 2.5}, 2.5, 2.5, {kInf, kInf}, kInf);
  const ModelIntegrand m(e, {WeightField::constant(1), WeightField::constant(2)},
                         WeightField::constant(1), 1.0);
  const Grid g = unit_box(2, 1.0 / 16);
  const auto start = dirichlet_start(
      g, BoundaryFunction::radial({0.5, 0.5}, 4.0, 1.0, 0.0), InitialGuess::zero);
  SolveConfig cfg;
  cfg.max_iters = 50000;
  const auto a = solve(m, start, cfg);
  const auto b = solve(m, start, cfg);
  CHECK(a.converged);
  REQUIRE(a.energy_history.size() >= 2);
  CHECK(a.energy_history.front() > a.energy_history.back());
  for (std::size_t i = 1; i < a.energy_history.size(); ++i)
    CHECK(a.energy_history[i] <= a.energy_history[i - 1]);
  CHECK(a.final_energy == a.energy_history.back());
  REQUIRE(a.u.values().size() == b.u.values().size());
  CHECK(std::memcmp(a.u.values().data(), b.u.values().data(),
                    a.u.values().size() * sizeof(double)) == 0);
  CHECK(a.iterations == b.iterations);

  SUBCASE("boundary values are untouched") {
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
      if (g.is_boundary_node(i)) CHECK(a.u[i] == start[i]);
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto m = laplace(2);
  const Grid g = unit_box(2, 1.0 / 16);
  const auto start = dirichlet_start(g, BoundaryFunction::product({0.5, 0.5}, 4.0, 0.0),
                                     InitialGuess::zero);
  SolveConfig cfg;
  cfg.max_iters = 2;
  const auto res = solve(m, start, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations <= 2);
  CHECK(res.residual > cfg.grad_tol);
}

TEST_CASE("smoothed energy gradient matches finite differences") {
  const Exponents e(2, {1.5, 3.0}, 3.0, 3.0, {kInf, kInf}, kInf);
  const ModelIntegrand m(e, {WeightField::constant(1), WeightField::constant(0.5)},
                         WeightField::constant(2), 1.0);
  const Grid g = unit_box(2, 0.25);
  const auto u = GridFunction::sample(g, [](auto x) { return std::sin(3 * x[0]) + x[1] * x[1]; });
  const auto w = sample_weights(m, g);
  std::vector<double> grad;
  const double eps = 1e-3;
  smoothed_energy(m, w, u, eps, &grad);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    if (g.is_boundary_node(i)) {
      CHECK(grad[i] == 0.0);
      continue;
    }
    std::vector<double> plus(u.values().begin(), u.values().end()), minus = plus;
    const double t = 1e-6;
    plus[i] += t;
    minus[i] -= t;
    const double fd = (smoothed_energy(m, w, GridFunction(g, plus), eps, nullptr) -
                       smoothed_energy(m, w, GridFunction(g, minus), eps, nullptr)) /
                      (2 * t);
    CHECK(grad[i] == Approx(fd).epsilon(1e-6).scale(1e-6));
  }
  // Without smoothing the energy coincides with the quadrature energy.
  CHECK(smoothed_energy(m, w, u, 0.0, nullptr) == Approx(energy(m, w, u, everywhere())).epsilon(1e-13));
}

TEST_CASE("quasi-minimality") {
  const auto m = laplace(2);
  const Grid g = unit_box(2, 1.0 / 16);
  const auto start = dirichlet_start(g, BoundaryFunction::product({0.5, 0.5}, 4.0, 0.0),
                                     InitialGuess::zero);
  const auto res = solve(m, start, {});
  REQUIRE(res.converged);

  SUBCASE("minimizer passes for random perturbations") {
    const auto phis = random_perturbations(g, 100, 42, 0.5);
    REQUIRE(phis.size() == 100);
    for (const auto& phi : phis)
      for (std::size_t i = 0; i < g.num_nodes(); ++i)
        if (g.is_boundary_node(i)) CHECK(phi[i] == 0.0);
    const auto rep = verify_quasiminimality(m, res.u, 1.0, phis);
    CHECK(rep.checks.size() == 100);
    CHECK(rep.failures == 0);
    CHECK(rep.empirical_q <= 1.0 + 1e-9);
  }
  SUBCASE("zero perturbation is an equality") {
    const std::vector<GridFunction> zero{GridFunction::zeros(g)};
    const auto rep = verify_quasiminimality(m, res.u, 1.0, zero);
    CHECK(rep.failures == 0);
    CHECK(rep.checks[0].lhs == rep.checks[0].rhs);
  }
  SUBCASE("a perturbed state fails against its own correction") {
    const auto bumped = GridFunction::sample(g, [](auto x) {
      return 5.0 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]);
    });
    const auto v = res.u.plus(bumped);
    const std::vector<GridFunction> phi{res.u.plus(v.scaled(-1.0))};
    const auto rep = verify_quasiminimality(m, v, 1.0, phi);
    CHECK(rep.failures == 1);
    CHECK(rep.empirical_q > 1.0);
  }
  SUBCASE("perturbations must vanish on the boundary") {
    const std::vector<GridFunction> bad{GridFunction::sample(g, [](auto) { return 1.0; })};
    CHECK_THROWS_AS(verify_quasiminimality(m, res.u, 1.0, bad), std::invalid_argument);
  }
  SUBCASE("seeded perturbations are reproducible") {
    const auto a = random_perturbations(g, 5, 7, 1.0);
    const auto b = random_perturbations(g, 5, 7, 1.0);
    for (std::size_t k = 0; k < 5; ++k)
      for (std::size_t i = 0; i < g.num_nodes(); ++i) CHECK(a[k][i] == b[k][i]);
  }
}
