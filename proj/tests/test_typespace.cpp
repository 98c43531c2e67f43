#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "suskit/typespace.hpp"

using namespace suskit;

TEST_CASE("uniform mesh basics") {
  const TypeSpace one = build_uniform_mesh(1);
  REQUIRE(one.points == std::vector<double>{0.5});
  REQUIRE(one.weights == std::vector<double>{1.0});

  const TypeSpace four = build_uniform_mesh(4);
  REQUIRE(four.points == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  for (double w : four.weights) REQUIRE(w == 0.25);

  REQUIRE(build_uniform_mesh(1000).total_mass == 1.0);
  REQUIRE_THROWS_AS(build_uniform_mesh(0), std::invalid_argument);
}

TEST_CASE("graded mesh basics") {
  const TypeSpace g = build_graded_mesh(2, 2.0);
  REQUIRE(g.points == std::vector<double>{0.125, 0.625});
  REQUIRE(g.weights == std::vector<double>{0.25, 0.75});

  const TypeSpace fine = build_graded_mesh(4000, 2.0);
  REQUIRE(fine.points.front() > 0.0);
  REQUIRE(std::abs(fine.total_mass - 1.0) < 1e-12);
  REQUIRE(std::is_sorted(fine.points.begin(), fine.points.end()));

  REQUIRE_THROWS_AS(build_graded_mesh(4, 0.5), std::invalid_argument);
}

TEST_CASE("graded mesh with gamma=1 is the uniform mesh bit-for-bit") {
  const TypeSpace u = build_uniform_mesh(137);
  const TypeSpace g = build_graded_mesh(137, 1.0);
  REQUIRE(u.points == g.points);
  REQUIRE(u.weights == g.weights);
  REQUIRE(u.total_mass == g.total_mass);
}

TEST_CASE("powerlaw space masses") {
  // Boundaries 1,2,4,8,16: the first cell is [1,2] with exact mass 1 - 2^{-q}.
  const double q = 2.5;
  const TypeSpace ts = build_powerlaw_space(q, 16.0, 4);
  REQUIRE(ts.weights[0] == Catch::Approx(1.0 - std::pow(2.0, -q)).epsilon(1e-13));
  REQUIRE(ts.total_mass == Catch::Approx(1.0 - std::pow(16.0, -q)).epsilon(1e-15));

  const TypeSpace big = build_powerlaw_space(2.5, 1e4, 4000);
  REQUIRE(big.total_mass == Catch::Approx(1.0 - 1e-10).epsilon(1e-14));

  REQUIRE_THROWS_AS(build_powerlaw_space(2.5, 0.9, 10), std::invalid_argument);
  REQUIRE_THROWS_AS(build_powerlaw_space(0.5, 10.0, 10), std::invalid_argument);
}

TEST_CASE("finite space") {
  const TypeSpace e2 = build_finite_space({0.5, 0.5});
  REQUIRE(e2.points == std::vector<double>{1.0, 2.0});
  REQUIRE(e2.total_mass == 1.0);
  REQUIRE(build_finite_space({0.2, 0.3, 0.5}).total_mass == Catch::Approx(1.0).epsilon(1e-15));
  REQUIRE(build_finite_space({1.0}).size() == 1);
  REQUIRE_THROWS_AS(build_finite_space({}), std::invalid_argument);
  REQUIRE_THROWS_AS(build_finite_space({0.5, -0.1}), std::invalid_argument);
}

TEST_CASE("integrate") {
  const TypeSpace u = build_uniform_mesh(1000);
  REQUIRE(integrate(u, [](double) { return 1.0; }) == Catch::Approx(u.total_mass).epsilon(1e-14));
  // Midpoint rule is exact for linear integrands.
  REQUIRE(integrate(u, [](double x) { return x; }) == Catch::Approx(0.5).epsilon(1e-12));

  // int_1^xmax x q x^{-q-1} dx = q/(q-1) (1 - xmax^{1-q})
  const double q = 2.5, xmax = 1e4;
  const TypeSpace pl = build_powerlaw_space(q, xmax, 4000);
  const double exact = q / (q - 1.0) * (1.0 - std::pow(xmax, 1.0 - q));
  REQUIRE(integrate(pl, [](double x) { return x; }) == Catch::Approx(exact).epsilon(1e-2));
  REQUIRE(std::abs(integrate(pl, [](double x) { return x; }) - 5.0 / 3.0) < 1e-2);

  REQUIRE_THROWS_AS(integrate(u, [](double x) { return 1.0 / (x - x); }), std::domain_error);
}

TEST_CASE("refinement halves the midpoint error, permutation leaves integrate alone") {
  const auto f = [](double x) { return x * x; };
  double prev_err = 0.0;
  for (std::size_t m : {50, 100, 200}) {
    const double err = std::abs(integrate(build_uniform_mesh(m), f) - 1.0 / 3.0);
    if (prev_err > 0.0) REQUIRE(err < 0.3 * prev_err);  // O(m^-2): halving m quarters the error
    prev_err = err;
  }

  TypeSpace ts = build_graded_mesh(64, 2.0);
  const double before = integrate(ts, f);
  std::vector<std::size_t> perm(ts.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937 gen(42);
  std::shuffle(perm.begin(), perm.end(), gen);
  TypeSpace shuffled = ts;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.points[i] = ts.points[perm[i]];
    shuffled.weights[i] = ts.weights[perm[i]];
  }
  REQUIRE(integrate(shuffled, f) == Catch::Approx(before).epsilon(1e-12));
}

TEST_CASE("csv serialization carries header and rows") {
  const TypeSpace ts = build_uniform_mesh(3);
  std::ostringstream os;
  write_csv(ts, os);
  const std::string text = os.str();
  REQUIRE(text.find("total_mass=1") != std::string::npos);
  REQUIRE(text.find("point,weight") != std::string::npos);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 5);  // header + columns + 3 rows
}
