#include "subsel/simulate.hpp"

#include <cmath>
#include <numbers>

#include "subsel/error.hpp"
#include "subsel/rng.hpp"

namespace subsel {

namespace {

// Separate streams keep generators independent for a shared seed.
constexpr std::uint64_t kStreamExample2 = 2;
constexpr std::uint64_t kStreamExample3 = 3;
constexpr std::uint64_t kStreamMortgage = 1;

double logistic(double t) noexcept {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace

double example2_response(double x, double z, double eps) noexcept {
  return -x / 2.0 - 5.0 / 3.0 + 0.35 * std::sin(x * x) + z / 9.0 + eps;
}

double example3_response(double x, double z, double eps) noexcept {
  return x + std::cos(x) + z / 9.0 + eps;
}

Dataset simulate_example2(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("simulate_example2: n must be positive");
  CounterRng rng(seed, kStreamExample2);
  Dataset data;
  data.feature_names = {"x"};
  data.confounder_names = {"z"};
  data.response_name = "y";
  const auto rows = static_cast<Index>(n);
  data.x.resize(rows, 1);
  data.z.resize(rows, 1);
  data.y.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    const double x = rng.normal(2.0, 1.0);
    const double z = rng.normal();
    const double eps = rng.normal();
    data.x(i, 0) = x;
    data.z(i, 0) = z;
    data.y(i) = example2_response(x, z, eps);
  }
  return data;
}

Dataset simulate_example3(std::uint64_t seed, std::size_t n) {
  constexpr std::size_t kLevels = 201;  // -100..100
  if (n == 0 || n > kLevels) throw InvalidInput("simulate_example3: n must be in [1, 201]");
  CounterRng rng(seed, kStreamExample3);
  const std::vector<std::size_t> picks = rng.sample_without_replacement(kLevels, n);
  Dataset data;
  data.feature_names = {"x"};
  data.confounder_names = {"z"};
  data.response_name = "y";
  const auto rows = static_cast<Index>(n);
  data.x.resize(rows, 1);
  data.z.resize(rows, 1);
  data.y.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    const double x = static_cast<double>(picks[static_cast<std::size_t>(i)]) - 100.0;
    const double z = rng.normal();
    const double eps = rng.normal();
    data.x(i, 0) = x;
    data.z(i, 0) = z;
    data.y(i) = example3_response(x, z, eps);
  }
  return data;
}

double logistic_normal_rate(double intercept, const Vector& slopes) {
  // Trapezoid rule on [-12, 12]; the Gaussian tail beyond is below 1e-32.
  constexpr int kNodes = 4801;
  constexpr double kHalfWidth = 12.0;
  const double s = slopes.norm();
  const double h = 2.0 * kHalfWidth / (kNodes - 1);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double total = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const double t = -kHalfWidth + h * k;
    const double w = (k == 0 || k == kNodes - 1) ? 0.5 : 1.0;
    total += w * norm * std::exp(-0.5 * t * t) * logistic(intercept + s * t);
  }
  return total * h;
}

double solve_intercept(const Vector& slopes, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidInput("target rate must lie in (0, 1)");
  double lo = -60.0;
  double hi = 60.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (logistic_normal_rate(mid, slopes) < rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vector default_mortgage_theta() {
  Vector slopes(4);
  slopes << 1.0, -0.5, 0.3, 2.0;
  Vector theta(5);
  theta << solve_intercept(slopes, kMortgagePositiveRate), slopes;
  return theta;
}

Dataset simulate_mortgage_analogue(std::size_t n, const Vector& theta, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("simulate_mortgage_analogue: n must be positive");
  if (theta.size() != 5) throw InvalidInput("mortgage analogue needs 5 coefficients");
  CounterRng rng(seed, kStreamMortgage);
  Dataset data;
  data.feature_names = {"creditscore", "houseAge", "yearsemploy", "ccDebt"};
  data.response_name = "default";
  const auto rows = static_cast<Index>(n);
  data.x.resize(rows, 4);
  data.z.resize(rows, 0);
  data.y.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    double eta = theta(0);
    for (Index j = 0; j < 4; ++j) {
      const double v = rng.normal();
      data.x(i, j) = v;
      eta += theta(j + 1) * v;
    }
    data.y(i) = rng.uniform() < logistic(eta) ? 1.0 : 0.0;
  }
  return data;
}

std::vector<GridAxis> mortgage_grid_axes() {
  return {
      {"creditscore", {-4, -3, -2, -1, 0, 1, 2, 3, 4}, false},
      {"houseAge", {-2, -1, 0, 1, 2}, false},
      {"yearsemploy", {-2, -1, 0, 1, 2, 3, 4}, false},
      {"ccDebt", {-2, -1, 0, 1, 2, 3, 4}, false},
  };
}

}  // namespace subsel
