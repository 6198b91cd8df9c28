#include <doctest.h>

#include <algorithm>
#include <set>

#include "../support/oracles.hpp"
#include "subsel/error.hpp"
#include "subsel/rng.hpp"
#include "subsel/sequential.hpp"
#include "subsel/simulate.hpp"

using namespace subsel;

namespace {

Dataset uniform_line(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 9);
  Dataset d;
  d.feature_names = {"x"};
  d.response_name = "y";
  d.x.resize(static_cast<Index>(n), 1);
  d.z.resize(static_cast<Index>(n), 0);
  d.y.resize(static_cast<Index>(n));
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    d.x(i, 0) = 2.0 * rng.uniform() - 1.0;
    d.y(i) = 1.0 + 2.0 * d.x(i, 0) + 0.1 * rng.normal();
  }
  return d;
}

SeqConfig line_config(std::size_t n_init, std::size_t n_target) {
  SeqConfig c;
  c.n_init = n_init;
  c.n_target = n_target;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  SeqConfig c = line_config(10, 20);
  CHECK_NOTHROW(c.validate(100));
  CHECK_THROWS_AS(c.validate(15), InvalidInput);
  c.batch_size = 11;
  CHECK_THROWS_AS(c.validate(100), InvalidInput);
  c = line_config(0, 10);
  CHECK_THROWS_AS(c.validate(100), InvalidInput);
  c = line_config(12, 10);
  CHECK_THROWS_AS(c.validate(100), InvalidInput);
  c = line_config(5, 10);
  c.utility = Utility::traceR;
  CHECK_THROWS_AS(c.validate(100), InvalidInput);
  c = line_config(5, 10);
  c.utility = Utility::Dnu;
  c.nu = 1.5;
  CHECK_THROWS_AS(c.validate(100), InvalidInput);
}

TEST_CASE("no iterations when the initial sample is the target") {
  const Dataset d = uniform_line(200, 1);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 21), false}});
  const ModelSpec spec(basis::linear(1, true));
  const SeqConfig c = line_config(15, 15);
  const SeqResult r = run_sequential(d, grid, spec, c);
  CHECK(r.trace.iterations.empty());
  CHECK(r.selection.indices == initial_sample(d, c));
  CHECK(r.selection.indices.size() == 15);
}

TEST_CASE("first D point on a line is a grid endpoint") {
  const Dataset d = uniform_line(2000, 2);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 21), false}});
  const ModelSpec spec(basis::linear(1, true));
  const SeqResult r = run_sequential(d, grid, spec, line_config(10, 11));
  REQUIRE(r.trace.iterations.size() == 1);
  const Index g = r.trace.iterations[0].grid_index;
  CHECK((g == 0 || g == 20));
}

TEST_CASE("D-utility picks the best augmentation at every step") {
  const Dataset d = uniform_line(3000, 3);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 41), false}});
  const ModelSpec spec(basis::polynomial(1, 0, 2, true));
  SeqConfig c = line_config(8, 60);
  c.batch_size = 2;
  const SeqResult r = run_sequential(d, grid, spec, c);
  std::vector<std::size_t> current = r.trace.initial;
  for (const SeqIteration& it : r.trace.iterations) {
    std::vector<oracle::Vec> rows;
    for (std::size_t i : current) {
      const double x = d.x(static_cast<Index>(i), 0);
      rows.push_back((oracle::Vec(3) << 1, x, x * x).finished());
    }
    const oracle::Mat base = oracle::sum_outer(rows, std::vector<double>(rows.size(), 1.0));
    std::vector<double> gains;
    for (Index g = 0; g < grid.size(); ++g) {
      const double x = grid.points()(g, 0);
      const oracle::Vec r_g = (oracle::Vec(3) << 1, x, x * x).finished();
      gains.push_back(oracle::det(base + r_g * r_g.transpose()));
    }
    const double best = *std::max_element(gains.begin(), gains.end());
    CHECK(gains[static_cast<std::size_t>(it.grid_index)] >= best * (1 - 1e-12));
    CHECK(it.matched.size() == 2);
    current.insert(current.end(), it.matched.begin(), it.matched.end());
    CHECK(it.n_current == current.size());
  }
  CHECK(current == r.selection.indices);
}

TEST_CASE("batches take the nearest unsampled rows") {
  const Dataset d = uniform_line(500, 4);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 11), false}});
  const ModelSpec spec(basis::linear(1, true));
  SeqConfig c = line_config(5, 25);
  c.batch_size = 5;
  const SeqResult r = run_sequential(d, grid, spec, c);
  std::set<std::size_t> taken(r.trace.initial.begin(), r.trace.initial.end());
  for (const SeqIteration& it : r.trace.iterations) {
    const double target = it.grid_point(0);
    double worst_matched = 0.0;
    for (std::size_t i : it.matched) worst_matched = std::max(worst_matched, std::abs(d.x(static_cast<Index>(i), 0) - target));
    for (std::size_t i : it.matched) taken.insert(i);
    for (Index i = 0; i < d.size(); ++i) {
      if (!taken.count(static_cast<std::size_t>(i))) CHECK(std::abs(d.x(i, 0) - target) >= worst_matched);
    }
  }
}

TEST_CASE("selection is complete, distinct and deterministic") {
  const Dataset d = uniform_line(1000, 6);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 21), false}});
  const ModelSpec spec(basis::polynomial(1, 0, 2, true));
  for (Utility u : {Utility::D, Utility::A, Utility::Inu, Utility::Dnu}) {
    SeqConfig c = line_config(10, 50);
    c.utility = u;
    c.batch_size = 3;
    const SeqResult a = run_sequential(d, grid, spec, c);
    CHECK(a.selection.indices.size() == 50);
    CHECK(std::set<std::size_t>(a.selection.indices.begin(), a.selection.indices.end()).size() == 50);
    c.threads = 4;
    const SeqResult b = run_sequential(d, grid, spec, c);
    CHECK(a.selection.indices == b.selection.indices);
    REQUIRE(a.final_fit.has_value());
  }
}

TEST_CASE("linear fit on the selection recovers the line") {
  const Dataset d = uniform_line(2000, 8);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 21), false}});
  const SeqResult r = run_sequential(d, grid, ModelSpec(basis::linear(1, true)), line_config(10, 100));
  REQUIRE(r.final_fit);
  CHECK(r.final_fit->theta_hat(0) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.final_fit->theta_hat(1) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("gain stopping ends early") {
  const Dataset d = uniform_line(1000, 9);
  const CandidateGrid grid = build_grid({{"x", linspace(-1, 1, 21), false}});
  SeqConfig c = line_config(10, 200);
  c.stop = {StopRule::Kind::utility_gain_below, 1e-2};
  const SeqResult r = run_sequential(d, grid, ModelSpec(basis::linear(1, true)), c);
  CHECK(r.selection.indices.size() < 200);
  CHECK(r.selection.indices.size() >= 10);
}

TEST_CASE("initial strategies on rare-event data") {
  const Dataset d = simulate_mortgage_analogue(20000, default_mortgage_theta(), 3);
  std::size_t positives = 0;
  for (Index i = 0; i < d.size(); ++i) positives += d.y(i) == 1.0;
  REQUIRE(positives > 5);

  SeqConfig c;
  c.n_init = 200;
  c.n_target = 200;
  c.family = ModelFamily::logistic;
  c.seed = 1;
  c.init.kind = InitStrategy::Kind::dope;
  const auto dope = initial_sample(d, c);
  CHECK(dope.size() == 200);
  std::size_t dope_pos = 0;
  for (std::size_t i : dope) dope_pos += d.y(static_cast<Index>(i)) == 1.0;
  CHECK(dope_pos == std::min<std::size_t>(positives, 200));

  c.init = {InitStrategy::Kind::stratified, 3, 5};
  const auto strat = initial_sample(d, c);
  CHECK(strat.size() == 200);
  CHECK(std::set<std::size_t>(strat.begin(), strat.end()).size() == 200);
  std::size_t strat_pos = 0;
  for (std::size_t i : strat) strat_pos += d.y(static_cast<Index>(i)) == 1.0;
  CHECK(strat_pos >= 5);

  c.init.kind = InitStrategy::Kind::random;
  CHECK(initial_sample(d, c) == initial_sample(d, c));
  c.seed = 2;
  const auto other = initial_sample(d, c);
  c.seed = 1;
  CHECK(initial_sample(d, c) != other);
}

TEST_CASE("logistic run with a tiny initial sample enlarges it") {
  const Dataset d = simulate_mortgage_analogue(20000, default_mortgage_theta(), 4);
  const CandidateGrid grid = build_grid(mortgage_grid_axes());
  SeqConfig c;
  c.n_init = 6;
  c.n_target = 400;
  c.batch_size = 20;
  c.family = ModelFamily::logistic;
  c.init.kind = InitStrategy::Kind::dope;
  const SeqResult r = run_sequential(d, grid, ModelSpec(basis::linear(4, true)), c);
  CHECK(r.trace.initial.size() > 6);
  CHECK(r.selection.indices.size() == 400);
}
