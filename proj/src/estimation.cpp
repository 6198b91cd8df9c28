#include "subsel/estimation.hpp"

#include <cmath>
#include <limits>

#include "subsel/error.hpp"
#include "subsel/linalg.hpp"

namespace subsel {

FitResult fit_ols(const Matrix& x, const Vector& y) {
  const Index n = x.rows();
  const Index k = x.cols();
  if (y.size() != n) throw InvalidInput("fit_ols: response length does not match rows");
  if (n < k || k == 0) throw InvalidInput("fit_ols: need at least as many rows as columns");
  Matrix xtx = x.transpose() * x;
  const Matrix xtx_inv = spd_inverse(0.5 * (xtx + xtx.transpose()), "X'X");

  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  FitResult fit;
  fit.theta_hat = qr.solve(y);
  const Vector residual = y - x * fit.theta_hat;
  fit.loglik_or_rss = residual.squaredNorm();
  const double sigma2 = n > k ? fit.loglik_or_rss / static_cast<double>(n - k)
                              : std::numeric_limits<double>::quiet_NaN();
  fit.std_errors = (sigma2 * xtx_inv.diagonal().array()).sqrt();
  fit.iterations = 1;
  fit.converged = true;
  fit.objective_trace = {fit.loglik_or_rss};
  return fit;
}

namespace {

double logistic(double t) noexcept {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// log(1 + exp(t)) without overflow.
double softplus(double t) noexcept {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double deviance(const Vector& eta, const Vector& y) {
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) total += softplus(eta(i)) - y(i) * eta(i);
  return 2.0 * total;
}

}  // namespace

FitResult fit_logistic(const Matrix& x, const Vector& y, const LogisticOptions& options) {
  const Index n = x.rows();
  const Index k = x.cols();
  if (y.size() != n) throw InvalidInput("fit_logistic: response length does not match rows");
  if (n < k || k == 0) throw InvalidInput("fit_logistic: need at least as many rows as columns");
  for (Index i = 0; i < n; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw InvalidInput("fit_logistic: response must be 0/1");
  }

  FitResult fit;
  Vector theta = Vector::Zero(k);
  Vector eta = Vector::Zero(n);
  double dev = deviance(eta, y);
  fit.objective_trace.push_back(dev);
  Matrix info;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    Vector pi(n), w(n);
    for (Index i = 0; i < n; ++i) {
      pi(i) = logistic(eta(i));
      w(i) = pi(i) * (1.0 - pi(i));
    }
    const Vector gradient = x.transpose() * (y - pi);
    info = x.transpose() * (x.array().colwise() * w.array()).matrix();
    info = 0.5 * (info + info.transpose()).eval();
    const Matrix info_inv = spd_inverse(info, "weighted cross-product X'WX");
    const Vector step = info_inv * gradient;
    // A vanishing gradient alone is not enough: on separated data it decays
    // while the Newton step stays of order one.
    if (gradient.cwiseAbs().maxCoeff() / static_cast<double>(n) < options.tol &&
        step.cwiseAbs().maxCoeff() < 1e-6 * (1.0 + theta.cwiseAbs().maxCoeff())) {
      fit.converged = true;
      fit.iterations = iter - 1;
      break;
    }

    double scale = 1.0;
    Vector candidate = theta + step;
    Vector candidate_eta = x * candidate;
    double candidate_dev = deviance(candidate_eta, y);
    for (int h = 0; h < options.max_halvings && !(candidate_dev <= dev); ++h) {
      scale *= 0.5;
      candidate = theta + scale * step;
      candidate_eta = x * candidate;
      candidate_dev = deviance(candidate_eta, y);
    }
    if (!(candidate_dev <= dev)) {
      // No halving improved the deviance: we are at the numerical optimum.
      fit.iterations = iter;
      fit.converged = gradient.cwiseAbs().maxCoeff() / static_cast<double>(n) < options.tol;
      break;
    }
    const bool decreasing = candidate_dev < dev;
    theta = std::move(candidate);
    eta = std::move(candidate_eta);
    dev = candidate_dev;
    fit.objective_trace.push_back(dev);
    fit.iterations = iter;
    if (theta.cwiseAbs().maxCoeff() > options.separation_bound && decreasing) {
      throw SeparationError("logistic fit diverges (|theta| > " + std::to_string(options.separation_bound) +
                            " with decreasing deviance): the data are separated");
    }
  }

  // Refresh the information at the final estimate.
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    const double p = logistic(eta(i));
    w(i) = p * (1.0 - p);
  }
  info = x.transpose() * (x.array().colwise() * w.array()).matrix();
  info = 0.5 * (info + info.transpose()).eval();
  const Matrix cov = spd_inverse(info, "weighted cross-product X'WX");
  fit.theta_hat = theta;
  fit.std_errors = cov.diagonal().cwiseSqrt();
  fit.loglik_or_rss = -0.5 * dev;
  return fit;
}

std::size_t ConfusionMatrix::total() const noexcept {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double ConfusionMatrix::accuracy() const noexcept {
  const std::size_t n = total();
  return n ? static_cast<double>(counts[0][0] + counts[1][1]) / static_cast<double>(n) : 0.0;
}

Vector predict_probability(const FitResult& fit, const Matrix& x) {
  if (x.cols() != fit.theta_hat.size()) throw InvalidInput("predict: column count does not match the fit");
  Vector eta = x * fit.theta_hat;
  for (Index i = 0; i < eta.size(); ++i) eta(i) = logistic(eta(i));
  return eta;
}

ConfusionMatrix predict_classify(const FitResult& fit, const Matrix& x_test, const Vector& y_test,
                                 double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidInput("threshold must lie in [0, 1]");
  if (x_test.cols() != fit.theta_hat.size()) throw InvalidInput("predict: column count does not match the fit");
  if (y_test.size() != x_test.rows()) throw InvalidInput("predict: label count does not match rows");
  const double cut = std::log(threshold) - std::log1p(-threshold);
  const Vector eta = x_test * fit.theta_hat;
  ConfusionMatrix cm;
  for (Index i = 0; i < eta.size(); ++i) {
    const std::size_t predicted = eta(i) >= cut ? 1 : 0;
    const std::size_t actual = y_test(i) != 0.0 ? 1 : 0;
    ++cm.counts[predicted][actual];
  }
  return cm;
}

}  // namespace subsel
