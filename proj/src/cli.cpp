#include "subsel/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <iterator>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "subsel/error.hpp"
#include "subsel/repro.hpp"
#include "subsel/serialize.hpp"

namespace subsel {

namespace fs = std::filesystem;

namespace {

struct DataOptions {
  std::string input;
  std::string response;
  std::vector<std::string> features;
  std::vector<std::string> confounders;

  void add(CLI::App* cmd, bool with_confounders) {
    cmd->add_option("--input", input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd->add_option("--response", response, "response column");
    cmd->add_option("--features", features, "feature columns (default: all others)")->delimiter(',');
    if (with_confounders) cmd->add_option("--confounders", confounders, "confounder columns")->delimiter(',');
  }

  Dataset load() const {
    CsvColumns cols;
    if (!response.empty()) cols.response = response;
    cols.features = features;
    cols.confounders = confounders;
    return load_csv(input, cols);
  }
};

const std::map<std::string, Utility> kUtilities = {
    {"D", Utility::D}, {"A", Utility::A}, {"Inu", Utility::Inu}, {"Dnu", Utility::Dnu}, {"traceR", Utility::traceR}};
const std::map<std::string, Distance> kDistances = {{"euclidean", Distance::euclidean},
                                                    {"scaled", Distance::scaled_euclidean}};
const std::map<std::string, InitStrategy::Kind> kInits = {{"random", InitStrategy::Kind::random},
                                                          {"stratified", InitStrategy::Kind::stratified},
                                                          {"dope", InitStrategy::Kind::dope}};
const std::map<std::string, ModelFamily> kFamilies = {{"linear", ModelFamily::linear},
                                                      {"logistic", ModelFamily::logistic}};

template <class T>
CLI::CheckedTransformer choices(const std::map<std::string, T>& m) {
  return CLI::CheckedTransformer(m, CLI::ignore_case);
}

ModelSpec default_model(Index x_dims, Index z_dims) {
  if (z_dims > 0) return ModelSpec(basis::linear(x_dims, true), std::nullopt, basis::linear(z_dims, false));
  return ModelSpec(basis::linear(x_dims, true));
}

ModelSpec load_model(const std::string& path, Index x_dims, Index z_dims) {
  return path.empty() ? default_model(x_dims, z_dims) : model_from_json(read_json(path));
}

// Resolved configuration of the active subcommand, loadable with --config.
void echo_config(const CLI::App& app, const fs::path& target) {
  std::string text = "threads=" + app.get_option("--threads")->as<std::string>() + "\n";
  for (const CLI::App* sub : app.get_subcommands()) {
    text += "[" + sub->get_name() + "]\n";
    std::istringstream lines(sub->config_to_str(true, false));
    for (std::string line; std::getline(lines, line);) {
      if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) text += line + "\n";
    }
  }
  write_text(text, target);
}

fs::path config_path_for(const std::string& out) {
  fs::path p(out);
  return p.parent_path() / (p.stem().string() + ".config.toml");
}

std::string theta_header(Index k) {
  std::string h;
  for (Index i = 0; i < k; ++i) h += ",theta" + std::to_string(i);
  return h;
}

std::string theta_cells(const Vector& t) {
  std::string s;
  for (Index i = 0; i < t.size(); ++i) s += "," + format_double(t(i));
  return s;
}

Json error_record(const char* kind, const std::string& message, int code) {
  return Json{{"error", kind}, {"message", message}, {"exit_code", code}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subsample selection and optimal design toolkit", "subsel"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file (flags override it)");
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (1 is the reproducible baseline)")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  std::function<void()> action;

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate one of the example datasets");
  std::string sim_which;
  std::uint64_t sim_seed = 0;
  std::size_t sim_n = 0;
  std::string sim_out;
  std::vector<double> sim_theta;
  sim->add_option("example", sim_which, "example1 | mortgage | example2 | example3")
      ->required()
      ->check(CLI::IsMember({"example1", "mortgage", "example2", "example3"}));
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--n", sim_n, "rows (default: 105, or 100000 for the mortgage analogue)");
  sim->add_option("--theta", sim_theta, "mortgage logit coefficients (5 values)")->delimiter(',');
  sim->add_option("--out", sim_out, "output CSV")->required();
  sim->callback([&] {
    action = [&] {
      Dataset d;
      if (sim_which == "example2") {
        d = simulate_example2(sim_n ? sim_n : 105, sim_seed);
      } else if (sim_which == "example3") {
        d = simulate_example3(sim_seed, sim_n ? sim_n : 105);
      } else {
        Vector theta = default_mortgage_theta();
        if (!sim_theta.empty()) {
          if (sim_theta.size() != 5) throw InvalidInput("--theta needs 5 values");
          theta = Eigen::Map<Vector>(sim_theta.data(), 5);
        }
        d = simulate_mortgage_analogue(sim_n ? sim_n : 100000, theta, sim_seed);
      }
      write_csv(d, sim_out);
      echo_config(app, config_path_for(sim_out));
      out << Json{{"rows", d.size()}, {"out", sim_out}}.dump() << "\n";
    };
  });

  // iboss
  auto* ib = app.add_subcommand("iboss", "information-based optimal subdata selection");
  DataOptions ib_data;
  ib_data.add(ib, false);
  std::size_t ib_n = 0;
  std::vector<std::string> ib_order;
  double ib_sigma = 1.0;
  std::string ib_out;
  ib->add_option("--n", ib_n, "subsample size")->required();
  bool ib_all_orders = false;
  ib->add_option("--order", ib_order, "column processing order (indices or names)")->delimiter(',');
  ib->add_flag("--all-orders", ib_all_orders, "report the selection under every column order (p <= 5)");
  ib->add_option("--sigma", ib_sigma, "noise sd for the determinant bound")->capture_default_str();
  ib->add_option("--out", ib_out, "selection JSON");
  ib->callback([&] {
    action = [&] {
      const Dataset d = ib_data.load();
      auto column_of = [&](const std::string& token) -> Index {
        const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), token);
        if (it != d.feature_names.end()) return static_cast<Index>(it - d.feature_names.begin());
        Index idx = -1;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
        if (ec != std::errc() || ptr != token.data() + token.size() || idx < 0 || idx >= d.dx()) {
          throw ConfigError("unknown column in --order: " + token);
        }
        return idx;
      };
      std::vector<Index> order;
      for (const std::string& token : ib_order) order.push_back(column_of(token));
      const IbossResult res = run_iboss(d, ib_n, order);
      const IbossBound bound = iboss_det_bound(d, res.selection, ib_n, ib_sigma);
      Json j = to_json(res);
      j["det"] = bound.det;
      j["bound"] = bound.bound;
      j["dropped_rows"] = d.dropped_rows;
      if (ib_all_orders) {
        if (d.dx() > 5) throw InvalidInput("--all-orders supports at most 5 columns");
        std::vector<Index> perm(static_cast<std::size_t>(d.dx()));
        std::iota(perm.begin(), perm.end(), Index{0});
        std::vector<std::size_t> base = run_iboss(d, ib_n, perm).selection.indices;
        std::sort(base.begin(), base.end());
        Json reports = Json::array();
        do {
          std::vector<std::size_t> sel = run_iboss(d, ib_n, perm).selection.indices;
          std::sort(sel.begin(), sel.end());
          std::vector<std::size_t> added, removed;
          std::set_difference(sel.begin(), sel.end(), base.begin(), base.end(), std::back_inserter(added));
          std::set_difference(base.begin(), base.end(), sel.begin(), sel.end(), std::back_inserter(removed));
          reports.push_back({{"order", perm}, {"indices", sel}, {"added_vs_dataset_order", added},
                             {"removed_vs_dataset_order", removed}});
        } while (std::next_permutation(perm.begin(), perm.end()));
        j["all_orders"] = reports;
      }
      if (!ib_out.empty()) {
        write_json(j, ib_out);
        echo_config(app, config_path_for(ib_out));
      }
      out << Json{{"size", res.selection.indices.size()}, {"det", bound.det}, {"bound", bound.bound}}.dump() << "\n";
    };
  });

  // seqdes
  auto* sq = app.add_subcommand("seqdes", "sequential utility-driven subsample selection");
  DataOptions sq_data;
  sq_data.add(sq, true);
  std::string sq_grid, sq_model, sq_bias, sq_out, sq_traj, sq_strat_col;
  SeqConfig sq_cfg;
  std::string sq_stop = "n";
  sq->add_option("--grid", sq_grid, "grid JSON")->required()->check(CLI::ExistingFile);
  sq->add_option("--model", sq_model, "model JSON (default: intercept plus linear terms)");
  sq->add_option("--family", sq_cfg.family, "linear | logistic")
      ->transform(choices(kFamilies))
      ->default_str("linear");
  sq->add_option("--utility", sq_cfg.utility, "D | A | Inu | Dnu | traceR")
      ->transform(choices(kUtilities))
      ->default_str("D");
  sq->add_option("--nu", sq_cfg.nu, "robustness weight for Inu / Dnu")->capture_default_str();
  sq->add_option("--bias", sq_bias, "bias JSON for traceR");
  sq->add_option("--n-init", sq_cfg.n_init, "initial sample size")->required();
  sq->add_option("--n", sq_cfg.n_target, "final sample size")->required();
  sq->add_option("--batch", sq_cfg.batch_size, "rows added per iteration")->capture_default_str();
  sq->add_option("--distance", sq_cfg.distance, "euclidean | scaled")
      ->transform(choices(kDistances))
      ->default_str("euclidean");
  sq->add_option("--init", sq_cfg.init.kind, "random | stratified | dope")
      ->transform(choices(kInits))
      ->default_str("random");
  sq->add_option("--strat-column", sq_strat_col, "column for stratified init");
  sq->add_option("--quantiles", sq_cfg.init.quantiles, "bins for stratified init")->capture_default_str();
  sq->add_option("--seed", sq_cfg.seed)->capture_default_str();
  sq->add_option("--stop", sq_stop, "n | gain")->check(CLI::IsMember({"n", "gain"}))->capture_default_str();
  sq->add_option("--epsilon", sq_cfg.stop.epsilon, "utility-gain threshold for --stop gain")->capture_default_str();
  sq->add_option("--refit-every", sq_cfg.refit_every, "iterations between re-estimates")->capture_default_str();
  sq->add_option("--out", sq_out, "selection JSON with trace");
  sq->add_option("--trajectory", sq_traj, "theta trajectory CSV");
  sq->callback([&] {
    action = [&] {
      const Dataset d = sq_data.load();
      const CandidateGrid grid = grid_from_json(read_json(sq_grid));
      const ModelSpec spec = load_model(sq_model, grid.x_dims(), grid.z_dims());
      sq_cfg.threads = threads;
      sq_cfg.stop.kind = sq_stop == "gain" ? StopRule::Kind::utility_gain_below : StopRule::Kind::n_reached;
      if (!sq_bias.empty()) sq_cfg.bias = bias_from_json(read_json(sq_bias));
      if (!sq_strat_col.empty()) {
        const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), sq_strat_col);
        if (it == d.feature_names.end()) throw ConfigError("unknown --strat-column " + sq_strat_col);
        sq_cfg.init.column = static_cast<Index>(it - d.feature_names.begin());
      }
      const SeqResult res = run_sequential(d, grid, spec, sq_cfg);
      Json j = to_json(res.selection);
      j["trace"] = to_json(res.trace);
      if (res.final_fit) j["fit"] = to_json(*res.final_fit);
      if (!sq_out.empty()) {
        write_json(j, sq_out);
        echo_config(app, config_path_for(sq_out));
      }
      if (!sq_traj.empty()) {
        std::string csv = "iteration,n,grid_index,utility" + theta_header(spec.k_total()) + "\n";
        if (res.trace.initial_theta.size() > 0) {
          csv += "0," + std::to_string(res.trace.initial.size()) + ",," + theta_cells(res.trace.initial_theta) + "\n";
        }
        for (const SeqIteration& it : res.trace.iterations) {
          csv += std::to_string(it.iteration) + "," + std::to_string(it.n_current) + "," +
                 std::to_string(it.grid_index) + "," + format_double(it.utility) + theta_cells(it.theta_hat) + "\n";
        }
        write_text(csv, sq_traj);
      }
      Json summary{{"size", res.selection.indices.size()}, {"iterations", res.trace.iterations.size()}};
      if (res.final_fit) summary["theta_hat"] = to_json(res.final_fit->theta_hat);
      out << summary.dump() << "\n";
    };
  });

  // robust
  auto* rb = app.add_subcommand("robust", "minimax D-robust design weights on a grid");
  std::string rb_grid, rb_model, rb_out, rb_traj, rb_stop = "n";
  double rb_nu = 0.5;
  std::size_t rb_iters = 2000;
  std::optional<std::size_t> rb_n_init;
  WiensConfig rb_cfg;
  rb->add_option("--grid", rb_grid, "grid JSON")->required()->check(CLI::ExistingFile);
  rb->add_option("--model", rb_model, "model JSON (default: intercept plus linear terms)");
  rb->add_option("--nu", rb_nu, "robustness weight in (0, 1)")->capture_default_str();
  rb->add_option("--iters", rb_iters, "weight updates")->capture_default_str();
  rb->add_option("--n-init", rb_n_init, "initial support size (default p + 1)");
  rb->add_option("--seed", rb_cfg.seed)->capture_default_str();
  rb->add_option("--stop", rb_stop, "n | gain")->check(CLI::IsMember({"n", "gain"}))->capture_default_str();
  rb->add_option("--epsilon", rb_cfg.stop.epsilon, "relative D_nu gain over 25 iterations for --stop gain")
      ->capture_default_str();
  rb->add_option("--out", rb_out, "final design JSON");
  rb->add_option("--trajectory", rb_traj, "per-iteration CSV");
  rb->callback([&] {
    action = [&] {
      const CandidateGrid grid = grid_from_json(read_json(rb_grid));
      const ModelSpec spec = load_model(rb_model, grid.x_dims(), grid.z_dims());
      const RobustContext ctx = RobustContext::from_grid(spec, grid, rb_nu);
      rb_cfg.n_init = rb_n_init;
      rb_cfg.n_target = rb_n_init.value_or(static_cast<std::size_t>(ctx.p()) + 1) + rb_iters;
      rb_cfg.stop.kind = rb_stop == "gain" ? WiensStop::Kind::dnu_gain_below : WiensStop::Kind::n_reached;
      rb_cfg.threads = threads;
      const WiensResult res = run_wiens(ctx, rb_cfg);
      const DesignMeasure design = measure_from_weights(spec, grid, res.weights);
      if (!rb_out.empty()) {
        Json j = to_json(design);
        j["d_nu"] = to_json(res.final_losses.d_nu);
        j["i_nu"] = to_json(res.final_losses.i_nu);
        j["initial_support"] = res.trajectory.initial_support;
        j["initial_d_nu"] = res.trajectory.initial_d_nu;
        write_json(j, rb_out);
        echo_config(app, config_path_for(rb_out));
      }
      if (!rb_traj.empty()) {
        std::string csv = "iteration,index,d_nu,lambda,weight_sum,min_weight,checksum\n0,," +
              format_double(res.trajectory.initial_d_nu) + ",,,,\n";
        for (const WiensStep& s : res.trajectory.steps) {
          csv += std::to_string(s.iteration) + "," + std::to_string(s.index) + "," + format_double(s.d_nu) + "," +
                 format_double(s.lambda) + "," + format_double(s.weight_sum) + "," + format_double(s.min_weight) +
                 "," + std::to_string(s.checksum) + "\n";
        }
        write_text(csv, rb_traj);
      }
      out << Json{{"support", design.size()},
                  {"iterations", res.trajectory.steps.size()},
                  {"d_nu", res.final_losses.d_nu.value},
                  {"i_nu", res.final_losses.i_nu.value}}
                 .dump()
          << "\n";
    };
  });

  // criteria
  auto* cr = app.add_subcommand("criteria", "evaluate design criteria");
  std::string cr_model, cr_design, cr_grid, cr_bias, cr_out;
  std::vector<std::string> cr_names;
  double cr_nu = 0.5;
  std::optional<double> cr_budget, cr_lambda;
  double cr_tol = 1e-9;
  bool cr_displayed = false;
  cr->add_option("--model", cr_model, "model JSON (default: intercept plus linear terms)");
  cr->add_option("--design", cr_design, "design JSON")->required()->check(CLI::ExistingFile);
  cr->add_option("--grid", cr_grid, "grid JSON (needed for I, Inu, Dnu, Montepiedra)");
  cr->add_option("--bias", cr_bias, "bias JSON (needed for traceR, detR_bias, detR_conf, Montepiedra)");
  cr->add_option("--criterion", cr_names, "D,A,I,Inu,Dnu,traceR,detR_bias,detR_conf (default: all applicable)")
      ->delimiter(',')
      ->check(CLI::IsMember({"D", "A", "I", "Inu", "Dnu", "traceR", "detR_bias", "detR_conf"}));
  cr->add_option("--nu", cr_nu)->capture_default_str();
  cr->add_flag("--displayed-cross-term", cr_displayed, "traceR with the single cross-term coefficient");
  cr->add_option("--budget", cr_budget, "Montepiedra budget B");
  cr->add_option("--lambda-star", cr_lambda, "Montepiedra lambda*");
  cr->add_option("--tol", cr_tol, "Montepiedra tolerance")->capture_default_str();
  cr->add_option("--out", cr_out, "criteria JSON");
  cr->callback([&] {
    action = [&] {
      const DesignMeasure design = design_from_json(read_json(cr_design));
      const Index xd = design.size() ? design.point(0).x.size() : 1;
      const Index zd = design.size() ? design.point(0).z.size() : 0;
      std::optional<CandidateGrid> grid;
      if (!cr_grid.empty()) grid = grid_from_json(read_json(cr_grid));
      const ModelSpec spec = load_model(cr_model, xd, zd);
      std::optional<BiasSpec> bias;
      if (!cr_bias.empty()) bias = bias_from_json(read_json(cr_bias));
      std::vector<std::string> names = cr_names;
      if (names.empty()) {
        names = {"D", "A"};
        if (grid) names.insert(names.end(), {"I", "Inu", "Dnu"});
        if (bias) names.insert(names.end(), {"traceR", "detR_bias", "detR_conf"});
      }
      const InformationMatrix info = information_matrix(spec, design);
      Json results = Json::array();
      for (const std::string& n : names) {
        if ((n == "I" || n == "Inu" || n == "Dnu") && !grid) throw ConfigError(n + " needs --grid");
        if ((n == "traceR" || n == "detR_bias" || n == "detR_conf") && !bias) throw ConfigError(n + " needs --bias");
        if (n == "D") results.push_back(to_json(d_criterion(info)));
        if (n == "A") results.push_back(to_json(a_criterion(info)));
        if (n == "I") results.push_back(to_json(i_criterion(spec, design, *grid)));
        if (n == "Inu" || n == "Dnu") {
          if (!(cr_nu >= 0.0 && cr_nu <= 1.0)) throw InvalidInput("--nu must lie in [0, 1]");
          const RobustContext ctx = RobustContext::from_grid(spec, *grid, cr_nu);
          const WiensLosses w = wiens_losses(ctx, weights_on_grid(spec, *grid, design));
          results.push_back(to_json(n == "Inu" ? w.i_nu : w.d_nu));
        }
        if (n == "traceR") {
          results.push_back(to_json(trace_r(info, *bias, cr_displayed ? CrossTerm::displayed : CrossTerm::derivation)));
        }
        if (n == "detR_bias") results.push_back(to_json(det_r_bias(info, *bias)));
        if (n == "detR_conf") results.push_back(to_json(det_r_confounder(info, *bias)));
      }
      Json j{{"criteria", results}};
      if (cr_budget || cr_lambda) {
        if (!(cr_budget && cr_lambda && grid && bias)) {
          throw ConfigError("Montepiedra check needs --budget, --lambda-star, --grid and --bias");
        }
        j["montepiedra"] = to_json(montepiedra_check(spec, design, *bias, *cr_budget, *cr_lambda, *grid, cr_tol));
      }
      if (!cr_out.empty()) {
        write_json(j, cr_out);
        echo_config(app, config_path_for(cr_out));
      }
      out << j.dump(2) << "\n";
    };
  });

  // check-get
  auto* gt = app.add_subcommand("check-get", "general equivalence theorem check on a grid");
  std::string gt_model, gt_design, gt_grid, gt_out;
  std::optional<Index> gt_k;
  double gt_tol = 1e-6;
  gt->add_option("--model", gt_model, "model JSON (default: intercept plus linear terms)");
  gt->add_option("--design", gt_design, "design JSON")->required()->check(CLI::ExistingFile);
  gt->add_option("--grid", gt_grid, "grid JSON")->required()->check(CLI::ExistingFile);
  gt->add_option("--k-eff", gt_k, "bound on the variance function (default: rank of M)");
  gt->add_option("--tol", gt_tol)->capture_default_str();
  gt->add_option("--out", gt_out, "verdict JSON");
  gt->callback([&] {
    action = [&] {
      const DesignMeasure design = design_from_json(read_json(gt_design));
      const CandidateGrid grid = grid_from_json(read_json(gt_grid));
      const ModelSpec spec = load_model(gt_model, grid.x_dims(), grid.z_dims());
      const GetVerdict v = get_check(spec, design, grid, gt_k, gt_tol, threads);
      const Json j = to_json(v);
      if (!gt_out.empty()) {
        write_json(j, gt_out);
        echo_config(app, config_path_for(gt_out));
      }
      out << j.dump(2) << "\n";
    };
  });

  // repro
  auto* rp = app.add_subcommand("repro", "desk-scale reproduction of the worked examples");
  int rp_which = 0;
  std::string rp_dir;
  std::uint64_t rp_seed = 1;
  Example1Config rp_ex1;
  rp->add_option("example", rp_which, "1 | 2 | 3")->required()->check(CLI::IsMember({1, 2, 3}));
  rp->add_option("--out-dir", rp_dir, "output directory (default: repro<example>)");
  rp->add_option("--seed", rp_seed)->capture_default_str();
  rp->add_option("--n", rp_ex1.n, "example 1 population size")->capture_default_str();
  rp->add_option("--batch", rp_ex1.batch, "example 1 batch size")->capture_default_str();
  rp->callback([&] {
    action = [&] {
      const fs::path dir = rp_dir.empty() ? fs::path("repro" + std::to_string(rp_which)) : fs::path(rp_dir);
      fs::create_directories(dir);
      echo_config(app, dir / "config.toml");
      Json summary{{"example", rp_which}, {"out_dir", dir.string()}};
      if (rp_which == 1) {
        rp_ex1.seed = rp_seed;
        rp_ex1.threads = threads;
        const Example1Report r = run_example1(rp_ex1);
        write_example1(r, dir);
        for (const Example1Run& run : r.runs) summary[run.strategy] = to_json(run.result.final_fit->theta_hat);
      } else if (rp_which == 2) {
        const Example2Report r = run_example2(rp_seed, 12, threads);
        write_example2(r, dir);
        summary["iboss_utility_larger"] = r.with_confounder.d_iboss >= r.with_confounder.d_sequential;
        summary["iboss_more_extreme"] = r.with_confounder.boundary_iboss >= r.with_confounder.boundary_sequential;
      } else {
        const Example3Report r = run_example3(rp_seed, 12, 2000, threads);
        write_example3(r, dir);
        summary["robust_support_x+z"] = measure_from_weights(
            ModelSpec(basis::linear(1, true), std::nullopt, basis::linear(1, false, 1.0 / 9.0)), r.grid_xz,
            r.wiens_xz.weights).size();
      }
      out << summary.dump() << "\n";
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_record("usage_error", e.what(), kExitConfig).dump() << "\n";
    return kExitConfig;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const SingularMatrix& e) {
    Json rec = error_record(e.kind(), e.what(), kExitNumerical);
    rec["smallest_eigenvalue"] = e.smallest_eigenvalue();
    err << rec.dump() << "\n";
    return kExitNumerical;
  } catch (const ExhaustionError& e) {
    Json rec = error_record(e.kind(), e.what(), kExitNumerical);
    rec["iteration"] = e.iteration();
    err << rec.dump() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << error_record(e.kind(), e.what(), kExitNumerical).dump() << "\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    Json rec = error_record(e.kind(), e.what(), kExitConfig);
    rec["row"] = e.row();
    rec["column"] = e.column();
    err << rec.dump() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << error_record(e.kind(), e.what(), kExitConfig).dump() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << error_record("config_error", e.what(), kExitConfig).dump() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_record("io_error", e.what(), kExitConfig).dump() << "\n";
    return kExitConfig;
  }
}

}  // namespace subsel
