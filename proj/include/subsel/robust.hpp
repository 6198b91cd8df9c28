#pragma once

// Sequential construction of minimax D-robust design weights on a finite
// design space (vertex-direction steps toward the largest diagonal of T).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "subsel/criteria.hpp"
#include "subsel/model.hpp"

namespace subsel {

struct WiensStop {
  enum class Kind { n_reached, dnu_gain_below };
  Kind kind = Kind::n_reached;
  double epsilon = 0.0;
  std::size_t window = 25;
};

struct WiensConfig {
  std::optional<std::size_t> n_init;  // default p + 1
  std::size_t n_target = 0;           // the update count runs from n_init to n_target
  std::uint64_t seed = 0;
  WiensStop stop;
  unsigned threads = 1;
};

struct WiensStep {
  std::size_t iteration;  // 1-based
  Index index;            // chosen design-space point
  double d_nu;            // after the update
  double lambda;          // lambda_max used for the step
  double weight_sum;      // after the update
  double min_weight;
  std::uint64_t checksum; // FNV-1a over the weight bytes after the update
};

struct RobustTrajectory {
  std::vector<Index> initial_support;
  double initial_d_nu = 0.0;
  std::vector<WiensStep> steps;
};

struct WiensResult {
  Vector weights;  // on the design space, length ctx.n()
  WiensLosses final_losses;
  RobustTrajectory trajectory;
};

/// Throws InvalidInput for nu outside (0, 1); SingularMatrix naming the
/// iteration when R is singular.
WiensResult run_wiens(const RobustContext& ctx, const WiensConfig& config);

/// Diagonal of T for the given weights; index i holds T_ii.
Vector wiens_t_diagonal(const RobustContext& ctx, const Vector& weights);

/// Design measure on the grid points carrying positive weight.
DesignMeasure measure_from_weights(const ModelSpec& spec, const CandidateGrid& grid, const Vector& weights);

std::uint64_t fnv1a(const Vector& v) noexcept;

}  // namespace subsel
