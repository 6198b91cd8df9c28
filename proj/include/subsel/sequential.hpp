#pragma once

// Sequential, response-adaptive subsample selection over a candidate grid:
// fit on an initial sample, repeatedly pick the grid point that most improves
// a design utility at the current estimate, and add the nearest unsampled
// data rows to it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "subsel/criteria.hpp"
#include "subsel/dataset.hpp"
#include "subsel/estimation.hpp"
#include "subsel/model.hpp"
#include "subsel/selection.hpp"

namespace subsel {

enum class Utility { D, A, Inu, Dnu, traceR };
enum class Distance { euclidean, scaled_euclidean };
enum class ModelFamily { linear, logistic };

struct InitStrategy {
  enum class Kind { random, stratified, dope };
  Kind kind = Kind::random;
  /// Stratified: column whose distribution among positive responses is cut
  /// into `quantiles` equal-probability bins, one row drawn per bin.
  Index column = 0;
  std::size_t quantiles = 10;
};

struct StopRule {
  enum class Kind { n_reached, utility_gain_below };
  Kind kind = Kind::n_reached;
  double epsilon = 0.0;
};

struct SeqConfig {
  std::size_t n_init = 0;
  std::size_t n_target = 0;
  std::size_t batch_size = 1;
  Utility utility = Utility::D;
  double nu = 0.5;                  // Inu / Dnu
  std::optional<BiasSpec> bias;     // traceR
  Distance distance = Distance::euclidean;
  InitStrategy init;
  std::uint64_t seed = 0;
  StopRule stop;
  ModelFamily family = ModelFamily::linear;
  /// Re-estimate theta every this many iterations (one iteration adds one batch).
  std::size_t refit_every = 1;
  unsigned threads = 1;
  LogisticOptions logistic;

  /// Throws InvalidInput unless 0 < n_init <= n_target <= n_rows and
  /// 1 <= batch_size <= n_target - n_init (when n_init < n_target).
  void validate(std::size_t n_rows) const;
};

struct SeqIteration {
  std::size_t iteration;               // 1-based
  Index grid_index;                    // d*
  Vector grid_point;                   // d* coordinates (x then z)
  std::vector<std::size_t> matched;    // rows added at this iteration
  double utility;                      // utility of the augmented design at d*
  std::size_t n_current;               // sample size after the addition
  Vector theta_hat;                    // estimate after this iteration (empty if not refitted)
};

struct SeqTrace {
  std::vector<std::size_t> initial;    // initial sample, after any enlargement
  Vector initial_theta;
  std::vector<SeqIteration> iterations;
};

struct SeqResult {
  SubsampleSelection selection;
  SeqTrace trace;
  std::optional<FitResult> final_fit;  // present when the data carry a response
};

/// Model rows of the dataset are eval_row(spec, x, z) with z taken from the
/// confounder columns when the spec has a g basis. Distances are measured
/// over the grid coordinates (x, plus z when the grid has z axes).
SeqResult run_sequential(const Dataset& data, const CandidateGrid& grid, const ModelSpec& spec,
                         const SeqConfig& config);

/// Initial sample for the configured strategy (before any enlargement).
std::vector<std::size_t> initial_sample(const Dataset& data, const SeqConfig& config);

}  // namespace subsel
