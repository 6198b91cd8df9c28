#include "subsel/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "subsel/error.hpp"
#include "subsel/linalg.hpp"
#include "subsel/parallel.hpp"
#include "subsel/rng.hpp"

namespace subsel {

void SeqConfig::validate(std::size_t n_rows) const {
  if (n_init == 0) throw InvalidInput("n_init must be positive");
  if (n_init > n_target) throw InvalidInput("n_init must not exceed n_target");
  if (n_target > n_rows) {
    throw InvalidInput("n_target (" + std::to_string(n_target) + ") exceeds dataset size (" +
                       std::to_string(n_rows) + ")");
  }
  if (batch_size == 0) throw InvalidInput("batch_size must be at least 1");
  if (n_init < n_target && batch_size > n_target - n_init) {
    throw InvalidInput("batch_size must not exceed n_target - n_init");
  }
  if (refit_every == 0) throw InvalidInput("refit_every must be at least 1");
  if ((utility == Utility::Inu || utility == Utility::Dnu) && !(nu >= 0.0 && nu <= 1.0)) {
    throw InvalidInput("nu must lie in [0, 1]");
  }
  if (utility == Utility::traceR && !bias) throw InvalidInput("traceR utility needs a bias specification");
  if (stop.kind == StopRule::Kind::utility_gain_below && !(stop.epsilon >= 0.0)) {
    throw InvalidInput("stop epsilon must be non-negative");
  }
}

namespace {

constexpr std::uint64_t kInitStream = 0x5e9;

void fill_random(std::vector<std::size_t>& chosen, std::vector<char>& taken, std::size_t target,
                 CounterRng& rng) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (!taken[i]) pool.push_back(i);
  }
  const std::size_t need = std::min(target - std::min(target, chosen.size()), pool.size());
  for (std::size_t pick : rng.sample_without_replacement(pool.size(), need)) {
    chosen.push_back(pool[pick]);
    taken[pool[pick]] = 1;
  }
}

std::vector<std::size_t> positives(const Dataset& data) {
  if (!data.has_response()) throw InvalidInput("initial strategy needs a response column");
  std::vector<std::size_t> out;
  for (Index i = 0; i < data.size(); ++i) {
    if (data.y(i) == 1.0) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace

std::vector<std::size_t> initial_sample(const Dataset& data, const SeqConfig& config) {
  const auto n = static_cast<std::size_t>(data.size());
  CounterRng rng(config.seed, kInitStream);
  std::vector<std::size_t> chosen;
  std::vector<char> taken(n, 0);

  switch (config.init.kind) {
    case InitStrategy::Kind::random:
      break;
    case InitStrategy::Kind::dope: {
      std::vector<std::size_t> pos = positives(data);
      if (pos.size() > config.n_init) {
        std::vector<std::size_t> keep;
        for (std::size_t pick : rng.sample_without_replacement(pos.size(), config.n_init)) keep.push_back(pos[pick]);
        pos = std::move(keep);
      }
      for (std::size_t i : pos) {
        chosen.push_back(i);
        taken[i] = 1;
      }
      break;
    }
    case InitStrategy::Kind::stratified: {
      if (config.init.column < 0 || config.init.column >= data.dx()) {
        throw InvalidInput("stratified column out of range");
      }
      if (config.init.quantiles == 0) throw InvalidInput("stratified quantiles must be positive");
      std::vector<std::size_t> pool = data.binary_response() ? positives(data) : std::vector<std::size_t>{};
      if (pool.empty()) {
        pool.resize(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
      }
      const Index col = config.init.column;
      std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
        return data.x(static_cast<Index>(a), col) < data.x(static_cast<Index>(b), col);
      });
      const std::size_t bins = std::min({config.init.quantiles, pool.size(), config.n_init});
      for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * pool.size() / bins;
        const std::size_t hi = (b + 1) * pool.size() / bins;
        const std::size_t pick = pool[lo + static_cast<std::size_t>(rng.below(hi - lo))];
        chosen.push_back(pick);
        taken[pick] = 1;
      }
      break;
    }
  }
  fill_random(chosen, taken, config.n_init, rng);
  return chosen;
}

namespace {

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

struct Sampler {
  const Dataset& data;
  const CandidateGrid& grid;
  const ModelSpec& spec;
  const SeqConfig& cfg;

  Matrix rows;        // data model rows, N x k
  Matrix grid_rows;   // grid model rows, G x k
  Matrix coords;      // data coordinates in grid space (scaled), N x c
  Matrix grid_coords; // grid coordinates (scaled), G x c
  std::vector<char> taken;
  std::vector<std::size_t> selected;
  Vector theta;                 // current estimate, empty when no response
  std::optional<FitResult> fit;

  // Grid-measure bookkeeping for the Wiens utilities.
  std::optional<RobustContext> wiens;
  Vector grid_counts;

  Sampler(const Dataset& d, const CandidateGrid& g, const ModelSpec& s, const SeqConfig& c)
      : data(d), grid(g), spec(s), cfg(c) {
    if (grid.size() == 0) throw InvalidInput("candidate grid is empty");
    if (grid.x_dims() != data.dx()) throw InvalidInput("grid x dimension does not match the dataset");
    if (grid.z_dims() > 0 && grid.z_dims() != data.dz()) {
      throw InvalidInput("grid z dimension does not match the dataset confounders");
    }
    if (cfg.family == ModelFamily::logistic && !data.binary_response()) {
      throw InvalidInput("logistic family needs a 0/1 response");
    }
    rows = model_matrix(spec, data);
    grid_rows = model_matrix(spec, grid);

    const Index ncol = grid.points().cols();
    coords.resize(data.size(), ncol);
    coords.leftCols(data.dx()) = data.x;
    if (grid.z_dims() > 0) coords.rightCols(grid.z_dims()) = data.z;
    grid_coords = grid.points();
    if (cfg.distance == Distance::scaled_euclidean) {
      for (Index j = 0; j < ncol; ++j) {
        const double mean = coords.col(j).mean();
        const double var = (coords.col(j).array() - mean).square().sum() /
                           std::max<double>(1.0, static_cast<double>(coords.rows() - 1));
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        coords.col(j) /= sd;
        grid_coords.col(j) /= sd;
      }
    }
    taken.assign(static_cast<std::size_t>(data.size()), 0);
    if (cfg.utility == Utility::Inu || cfg.utility == Utility::Dnu) {
      wiens.emplace(RobustContext(grid_rows, cfg.nu));
      grid_counts = Vector::Zero(grid.size());
    }
  }

  void add(std::size_t row) {
    taken[row] = 1;
    selected.push_back(row);
    if (wiens) grid_counts(nearest_grid(row)) += 1.0;
  }

  Index nearest_grid(std::size_t row) const {
    const auto r = static_cast<Index>(row);
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index g = 0; g < grid_coords.rows(); ++g) {
      const double d = (grid_coords.row(g) - coords.row(r)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = g;
      }
    }
    return best;
  }

  bool has_estimate() const { return data.has_response(); }

  void refit() {
    if (!has_estimate()) return;
    Matrix x(static_cast<Index>(selected.size()), rows.cols());
    Vector y(x.rows());
    for (std::size_t i = 0; i < selected.size(); ++i) {
      x.row(static_cast<Index>(i)) = rows.row(static_cast<Index>(selected[i]));
      y(static_cast<Index>(i)) = data.y(static_cast<Index>(selected[i]));
    }
    fit = cfg.family == ModelFamily::logistic ? fit_logistic(x, y, cfg.logistic) : fit_ols(x, y);
    theta = fit->theta_hat;
  }

  double row_weight(const Vector& row) const {
    if (cfg.family != ModelFamily::logistic) return 1.0;
    const double pi = logistic(row.dot(theta));
    return pi * (1.0 - pi);
  }

  // Unnormalised information of the current sample.
  Matrix info() const {
    const Index k = rows.cols();
    Matrix m = Matrix::Zero(k, k);
    for (std::size_t i : selected) {
      const Vector r = rows.row(static_cast<Index>(i)).transpose();
      m.selfadjointView<Eigen::Lower>().rankUpdate(r, row_weight(r));
    }
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    return m;
  }

  // Current utility and the per-grid-point augmented utilities share these.
  struct State {
    Matrix m;       // unnormalised information
    Matrix m_inv;
    double n;
    double log_det;
    Matrix r, s;    // Wiens moments
  };

  State state() const {
    State st;
    st.m = info();
    st.n = static_cast<double>(selected.size());
    st.m_inv = spd_inverse(st.m, "sample information matrix");
    st.log_det = log_det_psd(st.m).log_det;
    if (wiens) {
      const Matrix& q = wiens->q_matrix();
      const Vector xi = grid_counts / st.n;
      st.r = q.transpose() * xi.asDiagonal() * q;
      st.s = q.transpose() * xi.array().square().matrix().asDiagonal() * q;
    }
    return st;
  }

  double wiens_value(const Matrix& r, const Matrix& s) const {
    const WiensLosses w = wiens_losses_from_moments(r, s, cfg.nu);
    return cfg.utility == Utility::Inu ? w.i_nu.value : w.d_nu.value;
  }

  double current_utility(const State& st) const {
    const double k = static_cast<double>(st.m.rows());
    switch (cfg.utility) {
      case Utility::D: return st.log_det - k * std::log(st.n);
      case Utility::A: return -st.n * st.m_inv.trace();
      case Utility::traceR:
        return -trace_r(InformationMatrix(st.m / st.n, spec.p(), spec.m(), spec.q()), *cfg.bias).value;
      case Utility::Inu:
      case Utility::Dnu: return -wiens_value(st.r, st.s);
    }
    return 0.0;
  }

  double augmented_utility(const State& st, Index g) const {
    const Vector r = grid_rows.row(g).transpose();
    const double w = row_weight(r);
    const double k = static_cast<double>(st.m.rows());
    const double n1 = st.n + 1.0;
    switch (cfg.utility) {
      case Utility::D: {
        const double lev = r.dot(st.m_inv * r);
        return st.log_det + std::log1p(w * lev) - k * std::log(n1);
      }
      case Utility::A: {
        const Vector mr = st.m_inv * r;
        return -n1 * (st.m_inv.trace() - w * mr.squaredNorm() / (1.0 + w * r.dot(mr)));
      }
      case Utility::traceR: {
        Matrix aug = st.m;
        aug.noalias() += w * r * r.transpose();
        return -trace_r(InformationMatrix(aug / n1, spec.p(), spec.m(), spec.q()), *cfg.bias).value;
      }
      case Utility::Inu:
      case Utility::Dnu: {
        const Vector qg = wiens->q_matrix().row(g).transpose();
        const Matrix qq = qg * qg.transpose();
        const double xi_g = grid_counts(g) / st.n;
        const Matrix r_aug = (st.n * st.r + qq) / n1;
        const Matrix s_aug = (st.n * st.n * st.s + (2.0 * st.n * xi_g + 1.0) * qq) / (n1 * n1);
        try {
          return -wiens_value(r_aug, s_aug);
        } catch (const NumericalError&) {
          return -std::numeric_limits<double>::infinity();
        }
      }
    }
    return 0.0;
  }

  // The m nearest unsampled rows to grid point g, ordered by (distance, row).
  std::vector<std::size_t> nearest_rows(Index g, std::size_t m) const {
    using Entry = std::pair<double, std::size_t>;
    const Index n = coords.rows();
    const unsigned workers = std::max(1u, cfg.threads);
    std::vector<std::vector<Entry>> partial(workers);
    const Index chunk = (n + static_cast<Index>(workers) - 1) / static_cast<Index>(workers);
    auto scan = [&](Index begin, Index end, std::vector<Entry>& best) {
      auto cmp = [](const Entry& a, const Entry& b) { return a < b; };
      for (Index i = begin; i < end; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        const double d = (coords.row(i) - grid_coords.row(g)).squaredNorm();
        const Entry e{d, static_cast<std::size_t>(i)};
        if (best.size() < m) {
          best.push_back(e);
          std::push_heap(best.begin(), best.end(), cmp);
        } else if (e < best.front()) {
          std::pop_heap(best.begin(), best.end(), cmp);
          best.back() = e;
          std::push_heap(best.begin(), best.end(), cmp);
        }
      }
    };
    if (workers == 1 || n < 1024) {
      scan(0, n, partial[0]);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        const Index begin = static_cast<Index>(w) * chunk;
        const Index end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end, w] { scan(begin, end, partial[w]); });
      }
    }
    std::vector<Entry> merged;
    for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
    std::sort(merged.begin(), merged.end());
    if (merged.size() > m) merged.resize(m);
    std::vector<std::size_t> out;
    out.reserve(merged.size());
    for (const Entry& e : merged) out.push_back(e.second);
    return out;
  }
};

}  // namespace

SeqResult run_sequential(const Dataset& data, const CandidateGrid& grid, const ModelSpec& spec,
                         const SeqConfig& config) {
  config.validate(static_cast<std::size_t>(data.size()));
  if (config.utility == Utility::traceR) config.bias->validate(spec.m(), spec.q());
  Sampler s(data, grid, spec, config);

  // Initial sample; enlarge by doubling until the fit and the information are usable.
  const std::vector<std::size_t> init = initial_sample(data, config);
  for (std::size_t i : init) s.add(i);
  CounterRng grow_rng(config.seed, kInitStream + 1);
  for (;;) {
    try {
      s.refit();
      (void)s.state();
      break;
    } catch (const NumericalError&) {
      if (s.selected.size() >= config.n_target) throw;
      const std::size_t target = std::min(config.n_target, 2 * s.selected.size());
      std::vector<std::size_t> extra;
      std::vector<char> taken = s.taken;
      fill_random(extra, taken, target - s.selected.size(), grow_rng);
      for (std::size_t i : extra) s.add(i);
    }
  }

  SeqResult result;
  result.trace.initial = s.selected;
  result.trace.initial_theta = s.theta;

  std::size_t iteration = 0;
  while (s.selected.size() < config.n_target) {
    ++iteration;
    const Sampler::State st = s.state();
    const ArgMax best = parallel_argmax(grid.size(), config.threads,
                                        [&](Index g) { return s.augmented_utility(st, g); });
    if (best.index < 0) throw ExhaustionError("no grid point has a finite utility", iteration);
    if (config.stop.kind == StopRule::Kind::utility_gain_below &&
        best.value - s.current_utility(st) < config.stop.epsilon) {
      break;
    }
    const std::size_t want = std::min(config.batch_size, config.n_target - s.selected.size());
    const std::vector<std::size_t> matched = s.nearest_rows(best.index, want);
    if (matched.size() < want) {
      throw ExhaustionError("no unsampled data rows left near the chosen grid point", iteration);
    }
    for (std::size_t i : matched) s.add(i);

    SeqIteration rec;
    rec.iteration = iteration;
    rec.grid_index = best.index;
    rec.grid_point = grid.points().row(best.index).transpose();
    rec.matched = matched;
    rec.utility = best.value;
    rec.n_current = s.selected.size();
    if (iteration % config.refit_every == 0 || s.selected.size() == config.n_target) {
      s.refit();
      rec.theta_hat = s.theta;
    }
    result.trace.iterations.push_back(std::move(rec));
  }
  if (s.has_estimate() && (!s.fit || !result.trace.iterations.empty())) s.refit();

  result.selection.algorithm = "sequential";
  result.selection.indices = s.selected;
  result.final_fit = s.fit;
  return result;
}

}  // namespace subsel
