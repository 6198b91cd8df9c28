#include <doctest.h>

#include <cmath>
#include <set>

#include "subsel/error.hpp"
#include "subsel/simulate.hpp"

using namespace subsel;

TEST_CASE("response formulas") {
  CHECK(example2_response(0, 0, 0) == doctest::Approx(-5.0 / 3.0));
  CHECK(example2_response(2, 9, 0.5) == doctest::Approx(-1 - 5.0 / 3.0 + 0.35 * std::sin(4.0) + 1 + 0.5));
  CHECK(example3_response(0, 0, 0) == doctest::Approx(1.0));
  CHECK(example3_response(3, -9, 1) == doctest::Approx(3 + std::cos(3.0) - 1 + 1));
}

TEST_CASE("confounded sine data reproduce the formula and moments") {
  const Dataset d = simulate_example2(20000, 7);
  CHECK(d.size() == 20000);
  CHECK(d.x.col(0).mean() == doctest::Approx(2.0).epsilon(0.03));
  CHECK(std::abs(d.z.col(0).mean()) < 4.0 / std::sqrt(20000.0));
  const double var = (d.x.col(0).array() - d.x.col(0).mean()).square().sum() / 19999.0;
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
  // Residuals against the noiseless formula are N(0, 1).
  Vector eps(d.size());
  for (Index i = 0; i < d.size(); ++i) eps(i) = d.y(i) - example2_response(d.x(i, 0), d.z(i, 0), 0.0);
  CHECK(std::abs(eps.mean()) < 4.0 / std::sqrt(20000.0));
  CHECK(eps.squaredNorm() / 20000.0 == doctest::Approx(1.0).epsilon(0.05));

  const Dataset again = simulate_example2(20000, 7);
  CHECK(again.x == d.x);
  CHECK(again.y == d.y);
  CHECK(simulate_example2(20000, 8).x != d.x);
}

TEST_CASE("integer-design data use distinct integers") {
  const Dataset d = simulate_example3(3, 105);
  CHECK(d.size() == 105);
  std::set<double> seen;
  for (Index i = 0; i < d.size(); ++i) {
    const double x = d.x(i, 0);
    CHECK(x == std::round(x));
    CHECK(x >= -100);
    CHECK(x <= 100);
    seen.insert(x);
  }
  CHECK(seen.size() == 105);
  CHECK(simulate_example3(3, 105).y == d.y);
  CHECK_THROWS_AS(simulate_example3(0, 202), InvalidInput);
  CHECK(simulate_example3(0, 201).size() == 201);
}

TEST_CASE("normal-logistic rate agrees with a brute-force integral") {
  Vector s(2);
  s << 1.0, 1.0;
  // Midpoint rule on a much finer mesh over a wider range.
  double brute = 0.0;
  const double h = 1e-4;
  const double sd = std::sqrt(2.0);
  for (double t = -20 + h / 2; t < 20; t += h) {
    const double dens = std::exp(-0.5 * t * t / 2.0) / (sd * std::sqrt(2 * M_PI));
    brute += h * dens / (1 + std::exp(-(-3.0 + t)));
  }
  CHECK(logistic_normal_rate(-3.0, s) == doctest::Approx(brute).epsilon(1e-8));
  CHECK(logistic_normal_rate(0.0, s) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("intercept solves the target rate") {
  const Vector theta = default_mortgage_theta();
  CHECK(theta.size() == 5);
  CHECK(theta(1) == 1.0);
  CHECK(theta(4) == 2.0);
  CHECK(logistic_normal_rate(theta(0), theta.tail(4)) == doctest::Approx(kMortgagePositiveRate).epsilon(1e-9));
  CHECK(theta(0) < -5.0);
  CHECK_THROWS_AS(solve_intercept(theta.tail(4), 1.5), InvalidInput);
}

TEST_CASE("mortgage analogue matches the configured rate") {
  const Vector theta = default_mortgage_theta();
  const std::size_t n = 400000;
  const Dataset d = simulate_mortgage_analogue(n, theta, 11);
  CHECK(d.dx() == 4);
  CHECK(d.binary_response());
  const double rate = d.y.mean();
  const double se = std::sqrt(kMortgagePositiveRate * (1 - kMortgagePositiveRate) / static_cast<double>(n));
  CHECK(std::abs(rate - kMortgagePositiveRate) < 4 * se);

  Vector flat(5);
  flat << 0, 0, 0, 0, 0;
  const Dataset coin = simulate_mortgage_analogue(20000, flat, 1);
  CHECK(std::abs(coin.y.mean() - 0.5) < 4 * 0.5 / std::sqrt(20000.0));
  CHECK_THROWS_AS(simulate_mortgage_analogue(10, Vector::Zero(4), 1), InvalidInput);
}

TEST_CASE("mortgage grid") {
  const auto axes = mortgage_grid_axes();
  CHECK(axes.size() == 4);
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.levels.size();
  CHECK(total == 2205);
}
