#include <cmath>
#include <random>
#include <stdexcept>

#include "anisobound/integrand.hpp"
#include "doctest.h"

using namespace anisobound;
using doctest::Approx;

namespace {

const Exponent kInf = Exponent::infinity();

Grid unit_box(int n, double h) { return make_grid(std::vector<Interval>(n, {0.0, 1.0}), h); }

ModelIntegrand dirichlet_2d(double u_coeff = 0.0) {
  return ModelIntegrand(Exponents::isotropic(2, 2, 2, 2, kInf, kInf),
                        {WeightField::constant(1), WeightField::constant(1)},
                        WeightField::constant(1), u_coeff);
}

// Anisotropic model with a power weight on the last axis.
ModelIntegrand default_model() {
  const Exponents e(3, {2.0, 2.0, 3.0}, 3.0, 3.0, {kInf, kInf, Exponent::finite(4)},
                    Exponent::finite(4));
  return ModelIntegrand(e,
                        {WeightField::constant(1.5), WeightField::constant(0.5),
                         WeightField::power(1.0, {0.5, 0.5, 0.5}, 0.5)},
                        WeightField::power(2.0, {0.25, 0.5, 0.5}, -0.5), 1.0);
}

std::vector<double> random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("weight fields") {
  const auto c = WeightField::constant(2.5);
  CHECK(c.at(std::vector<double>{0.3, 0.1}) == 2.5);
  const auto w = WeightField::power(2.0, {0.0, 0.0}, 0.5);
  CHECK(w.at(std::vector<double>{3.0, 4.0}) == Approx(2.0 * std::sqrt(5.0)));
  const auto s = WeightField::power(1.0, {0.5, 0.5}, -1.0);
  CHECK(std::isinf(s.at(std::vector<double>{0.5, 0.5})));
  CHECK(s.at_cell(std::vector<double>{0.5, 0.5}, 0.25) == Approx(1.0 / 0.125));
  CHECK_THROWS_AS(WeightField::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightField::power(-1.0, {0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("model construction checks integrability") {
  const auto e = Exponents::isotropic(2, 2, 2, 2, Exponent::finite(3), kInf);
  // a r < n is required for lambda^{-1} in L^r: 0.5 * 3 < 2 passes, 1 * 3 fails.
  const auto ok = WeightField::power(1.0, {0.5, 0.5}, 0.5);
  const auto bad = WeightField::power(1.0, {0.5, 0.5}, 1.0);
  CHECK_NOTHROW(ModelIntegrand(e, {ok, ok}, WeightField::constant(1), 0.0));
  CHECK_THROWS_AS(ModelIntegrand(e, {ok, bad}, WeightField::constant(1), 0.0),
                  std::invalid_argument);
  // Vanishing power weights need a finite r.
  const auto e_inf = Exponents::isotropic(2, 2, 2, 2, kInf, kInf);
  CHECK_THROWS_AS(ModelIntegrand(e_inf, {ok, ok}, WeightField::constant(1), 0.0),
                  std::invalid_argument);
  // Singular mu needs finite s with -a s < n.
  const auto e_s = Exponents::isotropic(2, 2, 2, 2, kInf, Exponent::finite(3));
  const auto sing = WeightField::power(1.0, {0.5, 0.5}, -0.5);
  const auto too_sing = WeightField::power(1.0, {0.5, 0.5}, -1.0);
  const auto one = WeightField::constant(1);
  CHECK_NOTHROW(ModelIntegrand(e_s, {one, one}, sing, 1.0));
  CHECK_THROWS_AS(ModelIntegrand(e_s, {one, one}, too_sing, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelIntegrand(e_inf, {one, one}, sing, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelIntegrand(e_s, {one}, one, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelIntegrand(e_s, {one, one}, one, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelIntegrand(e_s, {one, WeightField::constant(0)}, one, 0.0),
                  std::invalid_argument);
}

TEST_CASE("integrand values") {
  const auto m = dirichlet_2d(1.0);
  const std::vector<double> x{0.2, 0.3};
  CHECK(eval_integrand(m, x, 1.0, std::vector<double>{1.0, 1.0}) == Approx(3.0));
  CHECK(eval_integrand(m, x, 0.0, std::vector<double>{0.0, 0.0}) == 0.0);
  const double a = eval_integrand(m, x, 0.0, std::vector<double>{0.3, -0.7});
  CHECK(eval_integrand(m, x, 0.0, std::vector<double>{0.6, -1.4}) == Approx(4.0 * a));

  SUBCASE("non-negative on random inputs") {
    const auto d = default_model();
    std::mt19937_64 rng(1);
    for (int t = 0; t < 1000; ++t) {
      const auto xx = random_vec(rng, 3, 0.0, 1.0);
      const auto xi = random_vec(rng, 3, -5.0, 5.0);
      CHECK(d.eval(xx, random_vec(rng, 1, -5.0, 5.0)[0], xi) >= 0.0);
    }
  }
}

TEST_CASE("growth sandwich") {
  SUBCASE("lower bound is an equality without the u term") {
    const auto m = dirichlet_2d(0.0);
    std::mt19937_64 rng(2);
    std::vector<GrowthSample> s;
    for (int t = 0; t < 200; ++t)
      s.push_back({random_vec(rng, 2, 0, 1), random_vec(rng, 1, -3, 3)[0], random_vec(rng, 2, -3, 3)});
    const auto r = check_growth(m, s);
    CHECK(r.samples == 200);
    CHECK(r.max_lower_violation == 0.0);
    CHECK(r.holds());
  }
  SUBCASE("random samples on the default model") {
    const auto m = default_model();
    std::mt19937_64 rng(3);
    std::vector<GrowthSample> s;
    for (int t = 0; t < 1000; ++t) {
      const double scale = std::pow(10.0, random_vec(rng, 1, -3, 2)[0]);
      auto xi = random_vec(rng, 3, -scale, scale);
      s.push_back({random_vec(rng, 3, 0, 1), random_vec(rng, 1, -scale, scale)[0], xi});
    }
    CHECK(check_growth(m, s).holds());
  }
  SUBCASE("small gradients") {
    const auto m = default_model();
    std::mt19937_64 rng(4);
    std::vector<GrowthSample> s;
    for (int t = 0; t < 300; ++t)
      s.push_back({random_vec(rng, 3, 0, 1), random_vec(rng, 1, -2, 2)[0], random_vec(rng, 3, -1, 1)});
    for (const auto& g : s) {
      const double f = m.eval(g.x, g.u, g.xi);
      CHECK(f <= m.upper_weight(g.x) * (std::pow(std::abs(g.u), 3.0) + 2.0) * (1 + 1e-14));
    }
    CHECK(check_growth(m, s).holds());
  }
  SUBCASE("an undersized upper weight is detected") {
    const auto m = dirichlet_2d(1.0).with_upper_weight_override(WeightField::constant(0.1));
    const std::vector<GrowthSample> s{{{0.5, 0.5}, 2.0, {3.0, 3.0}}};
    const auto r = check_growth(m, s);
    CHECK(r.max_upper_violation > 0.0);
    CHECK_FALSE(r.holds());
  }
}

TEST_CASE("convexity") {
  const auto m = default_model();
  std::mt19937_64 rng(5);
  std::vector<ConvexitySample> pairs;
  for (int t = 0; t < 1000; ++t) {
    pairs.push_back({random_vec(rng, 3, 0, 1), random_vec(rng, 1, -4, 4)[0],
                     random_vec(rng, 3, -4, 4), random_vec(rng, 1, -4, 4)[0],
                     random_vec(rng, 3, -4, 4)});
  }
  const auto r = check_convexity(m, pairs);
  CHECK(r.samples == 1000);
  CHECK(r.violations == 0);

  const std::vector<ConvexitySample> same{{{0.3, 0.3, 0.3}, 1.5, {1, 2, 3}, 1.5, {1, 2, 3}}};
  CHECK(check_convexity(m, same).max_excess == Approx(0.0).epsilon(1e-12));
  const std::vector<double> x{0.3, 0.4, 0.2}, xi{0.5, -1.5, 2.0};
  const std::vector<double> minus_xi{-0.5, 1.5, -2.0}, zero{0, 0, 0};
  CHECK(m.eval(x, 0.0, zero) <= m.eval(x, 1.2, xi));
  CHECK(m.eval(x, -1.2, minus_xi) == Approx(m.eval(x, 1.2, xi)));
}

TEST_CASE("energy quadrature") {
  SUBCASE("affine fields") {
    const auto m = dirichlet_2d(0.0);
    const Grid g = unit_box(2, 1.0 / 16);
    CHECK(energy(m, GridFunction::sample(g, [](auto x) { return x[0]; }), everywhere()) ==
          Approx(1.0).epsilon(1e-13));
    CHECK(energy(dirichlet_2d(1.0), GridFunction::zeros(g), everywhere()) == 0.0);

    const auto m1 = ModelIntegrand(Exponents::isotropic(1, 2, 2, 2, kInf, kInf),
                                   {WeightField::constant(1)}, WeightField::constant(1), 0.0);
    const Grid g1 = unit_box(1, 1.0 / 256);
    CHECK(energy(m1, GridFunction::sample(g1, [](auto x) { return x[0]; }), everywhere()) ==
          Approx(1.0).epsilon(1e-13));
  }

  SUBCASE("u term uses cell averages") {
    // Constant u = 1 has zero gradient, so only mu |u|^2 = 1 contributes.
    const auto m = dirichlet_2d(1.0);
    const Grid g = unit_box(2, 0.25);
    CHECK(energy(m, GridFunction::sample(g, [](auto) { return 1.0; }), everywhere()) ==
          Approx(1.0));
  }

  SUBCASE("additive over disjoint regions") {
    const auto m = default_model();
    const Grid g = unit_box(3, 0.125);
    std::mt19937_64 rng(6);
    const GridFunction u(g, random_vec(rng, static_cast<int>(g.num_nodes()), -1, 1));
    const double whole = energy(m, u, everywhere());
    const double left = energy(m, u, [](auto x) { return x[0] < 0.4; });
    const double right = energy(m, u, [](auto x) { return x[0] >= 0.4; });
    CHECK(left + right == Approx(whole).epsilon(1e-13));
    CHECK(whole >= 0.0);
  }

  SUBCASE("convex in the nodal vector") {
    const auto m = default_model();
    const Grid g = unit_box(3, 0.25);
    std::mt19937_64 rng(7);
    const auto w = sample_weights(m, g);
    for (int t = 0; t < 100; ++t) {
      const int nn = static_cast<int>(g.num_nodes());
      const GridFunction a(g, random_vec(rng, nn, -2, 2)), b(g, random_vec(rng, nn, -2, 2));
      const GridFunction mid = a.plus(b).scaled(0.5);
      const double ea = energy(m, w, a, everywhere()), eb = energy(m, w, b, everywhere());
      CHECK(energy(m, w, mid, everywhere()) <= 0.5 * (ea + eb) * (1 + 1e-12));
    }
  }

  SUBCASE("density matches the energy") {
    const auto m = default_model();
    const Grid g = unit_box(3, 0.25);
    std::mt19937_64 rng(8);
    const GridFunction u(g, random_vec(rng, static_cast<int>(g.num_nodes()), -1, 1));
    const auto w = sample_weights(m, g);
    const auto dens = integrand_density(m, w, u);
    double sum = 0.0;
    for (double v : dens.values) sum += v * g.cell_volume();
    CHECK(sum == Approx(energy(m, w, u, everywhere())).epsilon(1e-12));
  }
}

TEST_CASE("weight domination") {
  const auto m = default_model();
  const Grid g = unit_box(3, 0.125);
  const auto w = sample_weights(m, g);
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    for (int i = 0; i < 3; ++i) CHECK(w.lambda[i][c] <= 2.0 * w.upper[c]);
    CHECK(std::isfinite(w.mu[c]));
  }
  // Power weight centred on a cell centre stays finite after the shift.
  const auto e = Exponents::isotropic(2, 2, 2, 2, kInf, Exponent::finite(4));
  const ModelIntegrand sing(e, {WeightField::constant(1), WeightField::constant(1)},
                            WeightField::power(1.0, {0.5625, 0.5625}, -0.25), 1.0);
  const auto ws = sample_weights(sing, unit_box(2, 0.125));
  for (double v : ws.mu) CHECK(std::isfinite(v));
}
