#include <cmath>
#include <limits>
#include <random>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "anisobound/format.hpp"
#include "anisobound/grid.hpp"
#include "anisobound/gridfn_io.hpp"
#include "doctest.h"

using namespace anisobound;
using doctest::Approx;

namespace {

const Exponent kInf = Exponent::infinity();

Grid unit_box(int n, double h) { return make_grid(std::vector<Interval>(n, {0.0, 1.0}), h); }

GridFunction random_field(const Grid& g, std::uint64_t seed, double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(g.num_nodes());
  for (double& x : v) x = dist(rng);
  return GridFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g2 = unit_box(2, 0.5);
  CHECK(g2.node_counts() == std::vector<int>{3, 3});
  CHECK(g2.num_nodes() == 9);
  CHECK(g2.num_cells() == 4);
  CHECK(g2.cell_volume() == 0.25);

  const Grid g1 = unit_box(1, 0.25);
  CHECK(g1.node_counts() == std::vector<int>{5});

  CHECK_THROWS_AS(unit_box(1, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({{1.0, 0.0}}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(unit_box(2, 0.0), std::invalid_argument);

  SUBCASE("non-unit boxes, last axis fastest") {
    const Grid g = make_grid({{-1.0, 1.0}, {0.0, 0.5}}, 0.25);
    CHECK(g.node_counts() == std::vector<int>{9, 3});
    CHECK(g.node_stride(0) == 3);
    CHECK(g.node_stride(1) == 1);
    CHECK(g.node_point(4) == Point{-0.75, 0.25});
    CHECK(g.is_boundary_node(0));
    CHECK_FALSE(g.is_boundary_node(4));
    const auto c = g.cell_center(0);
    CHECK(c[0] == Approx(-0.875));
    CHECK(c[1] == Approx(0.125));
  }

  SUBCASE("ball containment") {
    const Grid g = unit_box(2, 0.125);
    CHECK(g.contains({{0.5, 0.5}, 0.5}));
    CHECK_FALSE(g.contains({{0.5, 0.5}, 0.51}));
    CHECK_FALSE(g.contains({{0.5}, 0.1}));
  }
}

TEST_CASE("grid function invariants") {
  const Grid g = unit_box(2, 0.5);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(8, 0.0)), std::invalid_argument);
  std::vector<double> bad(9, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(GridFunction(g, bad), std::invalid_argument);
  bad[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(GridFunction(g, bad), std::invalid_argument);

  const auto u = GridFunction::sample(g, [](std::span<const double> x) { return x[0] - 2 * x[1]; });
  CHECK(u[5] == Approx(0.5 - 2.0));
  CHECK(u.max_abs() == Approx(2.0));
  CHECK(u.scaled(-3.0)[5] == Approx(4.5));
  CHECK(u.plus(u)[5] == Approx(-3.0));
}

TEST_CASE("gradient") {
  SUBCASE("affine fields are exact") {
    for (int n = 1; n <= 4; ++n) {
      const Grid g = unit_box(n, n <= 2 ? 1.0 / 16 : 0.25);
      std::vector<double> a(n);
      for (int i = 0; i < n; ++i) a[i] = 0.7 * i - 1.3;
      const auto u = GridFunction::sample(g, [&](std::span<const double> x) {
        double v = 0.4;
        for (int i = 0; i < n; ++i) v += a[i] * x[i];
        return v;
      });
      const auto du = gradient(u);
      REQUIRE(du.size() == static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        for (double v : du[i].values) CHECK(v == Approx(a[i]).epsilon(1e-12));
    }
  }
  SUBCASE("coordinate function and constants") {
    const Grid g = unit_box(3, 0.25);
    const auto u = GridFunction::sample(g, [](std::span<const double> x) { return x[0]; });
    const auto du = gradient(u);
    for (double v : du[0].values) CHECK(v == Approx(1.0));
    for (double v : du[1].values) CHECK(v == 0.0);
    for (double v : du[2].values) CHECK(v == 0.0);
    const auto dc = gradient(GridFunction::sample(g, [](auto) { return 3.5; }));
    for (const auto& comp : dc)
      for (double v : comp.values) CHECK(v == 0.0);
  }
  SUBCASE("x squared by hand") {
    const Grid g = unit_box(1, 0.5);
    const auto du = gradient(GridFunction::sample(g, [](auto x) { return x[0] * x[0]; }));
    REQUIRE(du[0].values.size() == 2);
    CHECK(du[0].values[0] == Approx(0.5));
    CHECK(du[0].values[1] == Approx(1.5));
  }
  SUBCASE("degenerate axis") {
    const Grid g = make_grid({{0.0, 1.0}, {0.0, 0.0}}, 0.5);
    CHECK(g.node_counts() == std::vector<int>{3, 1});
    CHECK_THROWS_AS(gradient(GridFunction::zeros(g)), std::domain_error);
  }
  SUBCASE("cell average of an affine field is its centre value") {
    const Grid g = unit_box(2, 0.25);
    const auto avg = cell_average(GridFunction::sample(g, [](auto x) { return 2 * x[0] + x[1]; }));
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      const auto x = g.cell_center(c);
      CHECK(avg.values[c] == Approx(2 * x[0] + x[1]));
    }
  }
}

TEST_CASE("lp norms") {
  const Grid g = unit_box(2, 0.125);
  const CellField one{g, std::vector<double>(g.num_cells(), 1.0)};
  for (double b : {1.0, 1.5, 2.0, 7.0}) CHECK(lp_norm(one, Exponent::finite(b), everywhere()) == Approx(1.0));
  CHECK(lp_norm(one, kInf, everywhere()) == 1.0);
  const CellField two{g, std::vector<double>(g.num_cells(), 2.0)};
  CHECK(lp_norm(two, kInf, everywhere()) == 2.0);
  CHECK(lp_norm(two, Exponent::finite(2), [](auto) { return false; }) == 0.0);
  CHECK(lp_norm(two, kInf, [](auto) { return false; }) == 0.0);

  SUBCASE("midpoint quadrature of x on [0,1]") {
    const double h = 1.0 / 256;
    const Grid g1 = unit_box(1, h);
    const auto f = cell_average(GridFunction::sample(g1, [](auto x) { return x[0]; }));
    CHECK(std::abs(lp_norm(f, Exponent::finite(2), everywhere()) - std::sqrt(1.0 / 3.0)) <= 3 * h);
  }

  SUBCASE("absolute homogeneity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    const auto f = cell_average(random_field(g, 8));
    for (int t = 0; t < 50; ++t) {
      const double s = dist(rng);
      CellField sf = f;
      for (double& v : sf.values) v *= s;
      for (Exponent b : {Exponent::finite(1.0), Exponent::finite(2.5), kInf})
        CHECK(lp_norm(sf, b, everywhere()) ==
              Approx(std::abs(s) * lp_norm(f, b, everywhere())).epsilon(1e-12));
    }
  }

  SUBCASE("regions") {
    const Region ball = inside_ball({{0.5, 0.5}, 0.25});
    CHECK(ball(std::vector<double>{0.5, 0.7}));
    CHECK_FALSE(ball(std::vector<double>{0.5, 0.75}));
    const Region box = inside_box({{0.0, 0.5}, {0.0, 0.5}});
    CHECK(box(std::vector<double>{0.25, 0.25}));
    CHECK_FALSE(box(std::vector<double>{0.5, 0.25}));
    CHECK(lp_norm(one, Exponent::finite(1), box) == Approx(0.25));
  }
}

TEST_CASE("super-level sets") {
  const Grid g1 = unit_box(1, 0.25);
  const auto u = GridFunction::sample(g1, [](auto x) { return x[0]; });
  const Ball whole{{0.5}, 1.0};
  CHECK(superlevel_measure(u, 0.5, whole) == Approx(0.5));
  CHECK(superlevel_measure(u, 1.0, whole) == 0.0);
  CHECK(superlevel_measure(u, 5.0, whole) == 0.0);
  // Open ball: the node at distance exactly R is excluded.
  CHECK(superlevel_measure(u, -1.0, {{0.5}, 0.25}) == Approx(0.25));

  SUBCASE("monotone in k and R") {
    const Grid g = unit_box(2, 1.0 / 16);
    const auto v = random_field(g, 21);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
      double k1 = dist(rng), k2 = dist(rng);
      if (k1 > k2) std::swap(k1, k2);
      double r1 = 0.25 * (1 + dist(rng) / 2), r2 = 0.25 * (1 + dist(rng) / 2);
      if (r1 > r2) std::swap(r1, r2);
      const Ball b1{{0.5, 0.5}, r1}, b2{{0.5, 0.5}, r2};
      CHECK(superlevel_measure(v, k2, b1) <= superlevel_measure(v, k1, b1));
      CHECK(superlevel_measure(v, k1, b1) <= superlevel_measure(v, k1, b2));
    }
  }
}

TEST_CASE("truncation") {
  const Grid g = unit_box(1, 0.5);
  const GridFunction u(g, {3.0, 0.5, 1.0});
  const auto t = truncate(u, 1.0);
  CHECK(t[0] == 2.0);
  CHECK(t[1] == 0.0);
  CHECK(t[2] == 0.0);

  SUBCASE("nonincreasing in k, and J-type masses decrease") {
    const Grid g2 = unit_box(2, 1.0 / 16);
    const auto v = random_field(g2, 5);
    const Ball ball{{0.5, 0.5}, 0.4};
    double prev_mass = std::numeric_limits<double>::infinity();
    for (double k = -2.0; k <= 2.0; k += 0.25) {
      const auto lo = truncate(v, k), hi = truncate(v, k + 0.25);
      for (std::size_t i = 0; i < g2.num_nodes(); ++i) CHECK(hi[i] <= lo[i]);
      const double mass = lp_norm(cell_average(lo), Exponent::finite(2), inside_ball(ball));
      CHECK(mass <= prev_mass);
      prev_mass = mass;
    }
  }
}

TEST_CASE("GRIDFN round trip") {
  const Grid g = make_grid({{-0.5, 0.5}, {0.0, 0.75}, {1.0, 1.25}}, 0.125);
  std::vector<double> vals(g.num_nodes());
  std::mt19937_64 rng(99);
  for (double& v : vals) {
    const std::uint64_t bits = rng();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    v = std::isfinite(x) ? x : 1.0 / 3.0;
  }
  vals[0] = -0.0;
  vals[1] = std::numeric_limits<double>::denorm_min();
  vals[2] = std::numeric_limits<double>::max();
  const GridFunction u(g, vals);

  std::stringstream ss;
  write_gridfn(ss, u);
  const std::string text = ss.str();
  CHECK(text.rfind("GRIDFN v1\ndim=3\nbox=", 0) == 0);
  const GridFunction back = read_gridfn(ss);
  CHECK(back.grid() == g);
  REQUIRE(back.values().size() == vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(std::memcmp(&back.values()[i], &vals[i], sizeof(double)) == 0);

  std::stringstream again;
  write_gridfn(again, back);
  CHECK(again.str() == text);

  SUBCASE("malformed input") {
    for (const char* bad : {"GRIDFN v2\n", "GRIDFN v1\ndim=1\nbox=0:1\nh=0.5\n1\n2\n",
                            "GRIDFN v1\ndim=1\nbox=0:1\nh=0.5\n1\n2\nx\n",
                            "GRIDFN v1\ndim=2\nbox=0:1\nh=0.5\n",
                            "GRIDFN v1\ndim=1\nbox=0:1\nh=0.3\n1\n2\n3\n4\n"}) {
      std::istringstream is(bad);
      CHECK_THROWS_AS(read_gridfn(is), std::runtime_error);
    }
  }
}

TEST_CASE("decimal formatting") {
  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK(parse_double("0.10000000000000001") == 0.1);
  CHECK_THROWS_AS(parse_double("1e999"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("nan"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
  CHECK(join17({1.0, 0.5}, ',') == "1,0.5");
}
