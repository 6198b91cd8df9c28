#pragma once

// Generators for the three worked settings: a rare-event logistic
// "mortgage default" analogue, and two regression models carrying both a
// known-form bias term in x and a linear confounder in z.
//
// Every generator is a pure function of its parameters and seed; draws come
// from CounterRng in the documented order.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "subsel/dataset.hpp"
#include "subsel/model.hpp"

namespace subsel {

/// -x/2 - 5/3 + 0.35 sin(x^2) + z/9 + eps
double example2_response(double x, double z, double eps) noexcept;
/// x + cos(x) + z/9 + eps
double example3_response(double x, double z, double eps) noexcept;

/// x ~ N(2, 1), z ~ N(0, 1), eps ~ N(0, 1); per row the draws are x, z, eps.
/// Columns: feature "x", confounder "z", response "y".
Dataset simulate_example2(std::size_t n = 105, std::uint64_t seed = 0);

/// x: n distinct integers from -100..100 (partial Fisher-Yates), then per row
/// z ~ N(0, 1) and eps ~ N(0, 1).
Dataset simulate_example3(std::uint64_t seed = 0, std::size_t n = 105);

/// Observed positive rate of the reference mortgage data: 1031 in 10^6.
inline constexpr double kMortgagePositiveRate = 1031.0 / 1e6;

/// E[logistic(intercept + s'X)] for X ~ N(0, I): one-dimensional quadrature
/// of the logistic against N(0, |s|^2).
double logistic_normal_rate(double intercept, const Vector& slopes);

/// Intercept giving the requested mean positive rate for the slopes (bisection).
double solve_intercept(const Vector& slopes, double rate);

/// (theta0, 1, -0.5, 0.3, 2) with theta0 solved so the rate is 1031/10^6.
Vector default_mortgage_theta();

/// Four N(0, 1) covariates creditscore, houseAge, yearsemploy, ccDebt and a
/// binary response "default" with logit(pi) = theta' (1, x). Per row the draws
/// are the four covariates then one uniform for the response.
Dataset simulate_mortgage_analogue(std::size_t n, const Vector& theta, std::uint64_t seed = 0);

/// Discretisation of the standardized mortgage covariates.
std::vector<GridAxis> mortgage_grid_axes();

}  // namespace subsel
