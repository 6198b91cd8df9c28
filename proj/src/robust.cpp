#include "subsel/robust.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "subsel/error.hpp"
#include "subsel/linalg.hpp"
#include "subsel/parallel.hpp"
#include "subsel/rng.hpp"

namespace subsel {

std::uint64_t fnv1a(const Vector& v) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Index i = 0; i < v.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double x = v(i);
    std::memcpy(bytes, &x, sizeof x);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

struct Moments {
  Matrix r, s;
};

Moments moments(const Matrix& q, const Vector& xi) {
  const Matrix dq = q.array().colwise() * xi.array();
  const Matrix d2q = dq.array().colwise() * xi.array();
  Moments m{q.transpose() * dq, q.transpose() * d2q};
  m.r = 0.5 * (m.r + m.r.transpose()).eval();
  m.s = 0.5 * (m.s + m.s.transpose()).eval();
  return m;
}

struct StepTerms {
  Matrix r_inv;
  Vector v, w;
  double lambda;
};

StepTerms step_terms(const Matrix& q, const Vector& xi, double nu, WiensLosses* losses) {
  const Moments mo = moments(q, xi);
  const WiensLosses l = wiens_losses_from_moments(mo.r, mo.s, nu);
  const SymmetricRoots roots = symmetric_roots(mo.r);
  StepTerms t;
  t.r_inv = roots.inverse;
  t.v = roots.sqrt * l.eigenvector;
  t.w = roots.inv_sqrt * l.eigenvector;
  t.lambda = l.lambda;
  if (losses) *losses = l;
  return t;
}

double t_entry(const Matrix& q, const Vector& xi, double nu, const StepTerms& t, Index i) {
  const Vector qi = q.row(i).transpose();
  const double base = qi.dot(t.r_inv * qi);
  const double qw = qi.dot(t.w);
  const double qv = qi.dot(t.v);
  const double j = t.lambda * (base + qw * qw) + 2.0 * qw * qv;
  const double k = 2.0 * qw * qw;
  return (1.0 - nu) * base + nu * (j - xi(i) * k);
}

void check_nu(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw InvalidInput(
        "nu must lie strictly inside (0, 1): nu = 0 is the classical design problem and nu = 1 is "
        "solved by the uniform design");
  }
}

}  // namespace

Vector wiens_t_diagonal(const RobustContext& ctx, const Vector& weights) {
  check_nu(ctx.nu());
  if (weights.size() != ctx.n()) throw InvalidInput("weight vector length does not match the design space");
  const StepTerms t = step_terms(ctx.q_matrix(), weights, ctx.nu(), nullptr);
  Vector out(ctx.n());
  for (Index i = 0; i < ctx.n(); ++i) out(i) = t_entry(ctx.q_matrix(), weights, ctx.nu(), t, i);
  return out;
}

WiensResult run_wiens(const RobustContext& ctx, const WiensConfig& config) {
  check_nu(ctx.nu());
  const auto grid_n = static_cast<std::size_t>(ctx.n());
  const std::size_t n_init = config.n_init.value_or(static_cast<std::size_t>(ctx.p()) + 1);
  if (n_init == 0) throw InvalidInput("n_init must be at least 1");
  if (n_init > grid_n) throw InvalidInput("n_init exceeds the number of design-space points");
  if (config.n_target < n_init) throw InvalidInput("n_target must be at least n_init");
  if (config.stop.kind == WiensStop::Kind::dnu_gain_below && config.stop.window == 0) {
    throw InvalidInput("stop window must be positive");
  }

  const Matrix& q = ctx.q_matrix();
  const double nu = ctx.nu();
  WiensResult result;
  Vector xi = Vector::Zero(ctx.n());
  CounterRng rng(config.seed, 0x3a);
  for (std::size_t i : rng.sample_without_replacement(grid_n, n_init)) {
    xi(static_cast<Index>(i)) = 1.0 / static_cast<double>(n_init);
    result.trajectory.initial_support.push_back(static_cast<Index>(i));
  }

  std::vector<double> history;
  std::size_t iteration = 0;
  for (std::size_t n = n_init;; ++n) {
    WiensLosses losses;
    StepTerms t;
    try {
      t = step_terms(q, xi, nu, &losses);
    } catch (const SingularMatrix& e) {
      throw SingularMatrix("R is singular at iteration " + std::to_string(iteration) + ": " + e.what(),
                           e.smallest_eigenvalue());
    }
    const double d_nu = losses.d_nu.value;
    if (iteration == 0) {
      result.trajectory.initial_d_nu = d_nu;
    } else {
      result.trajectory.steps.back().d_nu = d_nu;
    }
    history.push_back(d_nu);
    result.final_losses = losses;

    if (n >= config.n_target) break;
    if (config.stop.kind == WiensStop::Kind::dnu_gain_below && history.size() > config.stop.window) {
      const double before = history[history.size() - 1 - config.stop.window];
      if ((before - d_nu) / std::abs(before) < config.stop.epsilon) break;
    }

    const ArgMax best = parallel_argmax(ctx.n(), config.threads,
                                        [&](Index i) { return t_entry(q, xi, nu, t, i); });
    const double nd = static_cast<double>(n);
    xi = (nd * xi) / (nd + 1.0);
    xi(best.index) += 1.0 / (nd + 1.0);
    ++iteration;
    result.trajectory.steps.push_back(
        {iteration, best.index, 0.0, t.lambda, xi.sum(), xi.minCoeff(), fnv1a(xi)});
  }
  result.weights = xi;
  return result;
}

DesignMeasure measure_from_weights(const ModelSpec& spec, const CandidateGrid& grid, const Vector& weights) {
  if (weights.size() != grid.size()) throw InvalidInput("weight vector length does not match the grid");
  std::vector<DesignPoint> points;
  std::vector<double> w;
  for (Index i = 0; i < grid.size(); ++i) {
    if (weights(i) > 0.0) {
      points.push_back(grid_point(spec, grid, i));
      w.push_back(weights(i));
    }
  }
  return DesignMeasure(std::move(points), Eigen::Map<Vector>(w.data(), static_cast<Index>(w.size())));
}

}  // namespace subsel
