#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "subsel/types.hpp"

namespace subsel {

struct FitResult {
  Vector theta_hat;
  Vector std_errors;
  double loglik_or_rss = 0.0;  // RSS for least squares, log-likelihood for logistic
  int iterations = 0;
  bool converged = false;
  /// Objective after each accepted step (RSS once for OLS, deviance per IRLS step).
  std::vector<double> objective_trace;
};

/// Least squares by column-pivoted QR. Standard errors from
/// sigma_hat^2 (X'X)^{-1} with sigma_hat^2 = RSS / (n - k); NaN when n == k.
/// Rank-deficient or ill-conditioned (cond(X'X) >= 1e12) X raises SingularMatrix.
FitResult fit_ols(const Matrix& x, const Vector& y);

struct LogisticOptions {
  int max_iter = 100;
  /// Convergence when the max-norm of the mean log-likelihood gradient,
  /// X'(y - pi) / n, drops below tol and the Newton step is below
  /// 1e-6 (1 + max|theta|).
  double tol = 1e-8;
  int max_halvings = 10;
  /// Coefficient magnitude beyond which a still-decreasing deviance is
  /// reported as separation.
  double separation_bound = 30.0;
};

/// Logistic maximum likelihood by iteratively reweighted least squares from
/// theta = 0 with step halving. Standard errors from (X'WX)^{-1}.
FitResult fit_logistic(const Matrix& x, const Vector& y, const LogisticOptions& options = {});

/// Counts indexed [predicted][actual], 0 = negative.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t total() const noexcept;
  double accuracy() const noexcept;
};

/// Predicted probabilities logistic(X theta).
Vector predict_probability(const FitResult& fit, const Matrix& x);

/// Positive iff the linear predictor is >= logit(threshold); threshold in
/// [0, 1] where 1 predicts everything negative.
ConfusionMatrix predict_classify(const FitResult& fit, const Matrix& x_test, const Vector& y_test,
                                 double threshold = 0.5);

}  // namespace subsel
