#include "subsel/repro.hpp"

#include <cmath>
#include <sstream>

#include "subsel/linalg.hpp"

#include "subsel/criteria.hpp"
#include "subsel/error.hpp"
#include "subsel/rng.hpp"
#include "subsel/serialize.hpp"

namespace subsel {

Dataset fold_confounders(const Dataset& data) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.feature_names.insert(out.feature_names.end(), data.confounder_names.begin(), data.confounder_names.end());
  out.x.resize(data.size(), data.dx() + data.dz());
  out.x.leftCols(data.dx()) = data.x;
  if (data.dz() > 0) out.x.rightCols(data.dz()) = data.z;
  out.z.resize(data.size(), 0);
  out.response_name = data.response_name;
  out.y = data.y;
  out.dropped_rows = data.dropped_rows;
  return out;
}

namespace {

constexpr std::uint64_t kTestSeedOffset = 0x7e57;

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\n";
}

double mean_abs_standardized(const Dataset& data, const std::vector<std::size_t>& rows) {
  const Vector x = data.x.col(0);
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
  double total = 0.0;
  for (std::size_t r : rows) total += std::abs((x(static_cast<Index>(r)) - mean) / sd);
  return total / static_cast<double>(rows.size());
}

double log_det_of(const ModelSpec& spec, const Dataset& data, const std::vector<std::size_t>& rows) {
  return log_det_psd(information_matrix_from_selection(spec, data, rows).full()).log_det;
}

DesignComparison compare(const std::string& label, const Dataset& data, const CandidateGrid& grid,
                         const ModelSpec& spec, std::size_t size, std::uint64_t seed, unsigned threads) {
  SeqConfig cfg;
  cfg.n_init = static_cast<std::size_t>(spec.k_total()) + 1;
  cfg.n_target = size;
  cfg.utility = Utility::D;
  cfg.family = ModelFamily::linear;
  cfg.seed = seed;
  cfg.threads = threads;
  DesignComparison out;
  out.label = label;
  out.sequential = run_sequential(data, grid, spec, cfg).selection;
  const Dataset folded = spec.q() > 0 ? fold_confounders(data) : data;
  out.iboss = run_iboss(folded, size).selection;
  out.d_sequential = log_det_of(spec, data, out.sequential.indices);
  out.d_iboss = log_det_of(spec, data, out.iboss.indices);
  out.boundary_sequential = mean_abs_standardized(data, out.sequential.indices);
  out.boundary_iboss = mean_abs_standardized(data, out.iboss.indices);
  return out;
}

std::vector<double> column_range(const Matrix& m, Index col, std::size_t count) {
  return linspace(m.col(col).minCoeff(), m.col(col).maxCoeff(), count);
}

Json comparison_json(const DesignComparison& c) {
  return Json{{"label", c.label},
              {"sequential", to_json(c.sequential)},
              {"iboss", to_json(c.iboss)},
              {"log_det_sequential", c.d_sequential},
              {"log_det_iboss", c.d_iboss},
              {"mean_abs_std_x_sequential", c.boundary_sequential},
              {"mean_abs_std_x_iboss", c.boundary_iboss},
              {"iboss_utility_larger", c.d_iboss >= c.d_sequential},
              {"iboss_more_extreme", c.boundary_iboss >= c.boundary_sequential}};
}

std::string scatter_csv(const Dataset& data, const std::vector<const DesignComparison*>& parts) {
  std::string out = csv_row({"model", "algorithm", "row", "x", "z", "y"});
  for (const DesignComparison* c : parts) {
    for (const auto* sel : {&c->sequential, &c->iboss}) {
      for (std::size_t r : sel->indices) {
        const auto i = static_cast<Index>(r);
        out += csv_row({c->label, sel->algorithm, std::to_string(r), format_double(data.x(i, 0)),
                        data.dz() > 0 ? format_double(data.z(i, 0)) : "", format_double(data.y(i))});
      }
    }
  }
  return out;
}

}  // namespace

Example1Report run_example1(const Example1Config& config) {
  Example1Report report;
  report.config = config;
  report.theta_true = default_mortgage_theta();
  const Dataset data = simulate_mortgage_analogue(config.n, report.theta_true, config.seed);
  const Dataset test = simulate_mortgage_analogue(config.n_test, report.theta_true, config.seed + kTestSeedOffset);
  report.positives = static_cast<std::size_t>(data.y.sum());
  const CandidateGrid grid = build_grid(mortgage_grid_axes());
  const ModelSpec spec(basis::linear(4, true));
  const Matrix x_test = model_matrix(spec, test);

  const std::vector<std::pair<std::string, InitStrategy::Kind>> strategies = {
      {"dope", InitStrategy::Kind::dope},
      {"random", InitStrategy::Kind::random},
      {"stratified", InitStrategy::Kind::stratified}};
  for (const auto& [name, kind] : strategies) {
    SeqConfig cfg;
    cfg.n_init = config.n_init;
    cfg.n_target = config.n_target;
    cfg.batch_size = config.batch;
    cfg.utility = Utility::D;
    cfg.family = ModelFamily::logistic;
    cfg.init.kind = kind;
    cfg.init.column = 3;  // ccDebt
    cfg.init.quantiles = config.quantiles;
    cfg.seed = config.seed;
    cfg.threads = config.threads;
    SeqResult res = run_sequential(data, grid, spec, cfg);
    report.confusion["algorithm1_" + name] = predict_classify(*res.final_fit, x_test, test.y);
    report.runs.push_back({name, std::move(res)});
  }

  CounterRng rng(config.seed, 0x4a);
  const std::vector<std::size_t> random_rows = rng.sample_without_replacement(data.size(), config.n_target);
  const Dataset random_train = data.subset(random_rows);
  report.random_fit = fit_logistic(model_matrix(spec, random_train), random_train.y);
  report.confusion["logistic_random_train"] = predict_classify(report.random_fit, x_test, test.y);
  return report;
}

void write_example1(const Example1Report& report, const std::filesystem::path& dir) {
  std::string traj = csv_row({"strategy", "iteration", "n", "theta0", "theta1", "theta2", "theta3", "theta4"});
  auto theta_cells = [](const Vector& t) {
    std::vector<std::string> cells;
    for (Index i = 0; i < t.size(); ++i) cells.push_back(format_double(t(i)));
    return cells;
  };
  Json fits = Json::object();
  fits["theta_true"] = to_json(report.theta_true);
  fits["positives_in_data"] = report.positives;
  for (const Example1Run& run : report.runs) {
    std::vector<std::string> head = {run.strategy, "0", std::to_string(run.result.trace.initial.size())};
    const auto t0 = theta_cells(run.result.trace.initial_theta);
    head.insert(head.end(), t0.begin(), t0.end());
    traj += csv_row(head);
    for (const SeqIteration& it : run.result.trace.iterations) {
      if (it.theta_hat.size() == 0) continue;
      std::vector<std::string> row = {run.strategy, std::to_string(it.iteration), std::to_string(it.n_current)};
      const auto t = theta_cells(it.theta_hat);
      row.insert(row.end(), t.begin(), t.end());
      traj += csv_row(row);
    }
    Json sel = to_json(run.result.selection);
    sel["trace"] = to_json(run.result.trace);
    write_json(sel, dir / ("selection_" + run.strategy + ".json"));
    fits["algorithm1_" + run.strategy] = to_json(*run.result.final_fit);
  }
  fits["logistic_random_train"] = to_json(report.random_fit);
  write_text(traj, dir / "theta_trajectory.csv");
  write_json(fits, dir / "fits.json");
  Json conf = Json::object();
  for (const auto& [name, c] : report.confusion) conf[name] = to_json(c);
  write_json(conf, dir / "confusion.json");
}

Example2Report run_example2(std::uint64_t seed, std::size_t design_size, unsigned threads) {
  Example2Report report;
  report.seed = seed;
  report.data = simulate_example2(105, seed);
  const Dataset& data = report.data;
  const std::vector<double> xs = column_range(data.x, 0, 200);
  const std::vector<double> zs = column_range(data.z, 0, 200);
  const CandidateGrid grid_xz = build_grid({{"x", xs, false}, {"z", zs, true}});
  const CandidateGrid grid_x = build_grid({{"x", xs, false}});
  const ModelSpec spec_xz(basis::linear(1, true), std::nullopt, basis::linear(1, false, 1.0 / 9.0));
  const ModelSpec spec_x(basis::linear(1, true));
  Dataset x_only = data;
  x_only.z.resize(data.size(), 0);
  x_only.confounder_names.clear();
  report.with_confounder = compare("x+z", data, grid_xz, spec_xz, design_size, seed, threads);
  report.without_confounder = compare("x", x_only, grid_x, spec_x, design_size, seed, threads);
  return report;
}

void write_example2(const Example2Report& report, const std::filesystem::path& dir) {
  write_csv(report.data, dir / "data.csv");
  write_text(scatter_csv(report.data, {&report.with_confounder, &report.without_confounder}), dir / "designs.csv");
  write_json(Json{{"seed", report.seed},
                  {"with_confounder", comparison_json(report.with_confounder)},
                  {"without_confounder", comparison_json(report.without_confounder)}},
             dir / "comparison.json");
}

Example3Report run_example3(std::uint64_t seed, std::size_t design_size, std::size_t wiens_iters, unsigned threads) {
  Example3Report report;
  report.seed = seed;
  report.data = simulate_example3(seed);
  const Dataset& data = report.data;
  const std::vector<double> xs = linspace(-100.0, 100.0, 100);
  const std::vector<double> zs = linspace(-3.0, 3.0, 100);
  report.grid_xz = build_grid({{"x", xs, false}, {"z", zs, true}});
  report.grid_x = build_grid({{"x", xs, false}});
  const ModelSpec spec_xz(basis::linear(1, true), std::nullopt, basis::linear(1, false, 1.0 / 9.0));
  const ModelSpec spec_x(basis::linear(1, true));
  Dataset x_only = data;
  x_only.z.resize(data.size(), 0);
  x_only.confounder_names.clear();
  report.with_confounder = compare("x+z", data, report.grid_xz, spec_xz, design_size, seed, threads);
  report.without_confounder = compare("x", x_only, report.grid_x, spec_x, design_size, seed, threads);

  WiensConfig wc;
  wc.seed = seed;
  wc.threads = threads;
  const RobustContext ctx_xz = RobustContext::from_grid(spec_xz, report.grid_xz, 0.5);
  wc.n_target = static_cast<std::size_t>(ctx_xz.p()) + 1 + wiens_iters;
  report.wiens_xz = run_wiens(ctx_xz, wc);
  const RobustContext ctx_x = RobustContext::from_grid(spec_x, report.grid_x, 0.5);
  wc.n_target = static_cast<std::size_t>(ctx_x.p()) + 1 + wiens_iters;
  report.wiens_x = run_wiens(ctx_x, wc);
  return report;
}

void write_example3(const Example3Report& report, const std::filesystem::path& dir) {
  write_csv(report.data, dir / "data.csv");
  std::string scatter = scatter_csv(report.data, {&report.with_confounder, &report.without_confounder});
  write_text(scatter, dir / "designs.csv");

  std::string robust = csv_row({"model", "grid_index", "x", "z", "weight"});
  auto add_support = [&](const std::string& label, const CandidateGrid& grid, const WiensResult& w) {
    for (Index i = 0; i < grid.size(); ++i) {
      if (w.weights(i) <= 0.0) continue;
      robust += csv_row({label, std::to_string(i), format_double(grid.points()(i, 0)),
                         grid.z_dims() > 0 ? format_double(grid.points()(i, 1)) : "", format_double(w.weights(i))});
    }
  };
  add_support("x+z", report.grid_xz, report.wiens_xz);
  add_support("x", report.grid_x, report.wiens_x);
  write_text(robust, dir / "robust_design.csv");

  std::string traj = csv_row({"model", "iteration", "index", "d_nu", "lambda"});
  for (const auto& [label, w] : {std::pair<std::string, const WiensResult*>{"x+z", &report.wiens_xz},
                                 std::pair<std::string, const WiensResult*>{"x", &report.wiens_x}}) {
    traj += csv_row({label, "0", "", format_double(w->trajectory.initial_d_nu), ""});
    for (const WiensStep& s : w->trajectory.steps) {
      traj += csv_row({label, std::to_string(s.iteration), std::to_string(s.index), format_double(s.d_nu),
                       format_double(s.lambda)});
    }
  }
  write_text(traj, dir / "robust_trajectory.csv");

  write_json(Json{{"seed", report.seed},
                  {"nu", 0.5},
                  {"with_confounder", comparison_json(report.with_confounder)},
                  {"without_confounder", comparison_json(report.without_confounder)},
                  {"robust_d_nu_x+z", report.wiens_xz.final_losses.d_nu.value},
                  {"robust_d_nu_x", report.wiens_x.final_losses.d_nu.value}},
             dir / "comparison.json");
}

}  // namespace subsel
