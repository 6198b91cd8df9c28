#pragma once

// Information-based optimal subdata selection: for each covariate in turn,
// take the r smallest and r largest values among rows not yet selected.

#include <cstddef>
#include <vector>

#include "subsel/dataset.hpp"
#include "subsel/selection.hpp"

namespace subsel {

struct IbossCut {
  Index column;
  std::size_t low_count;
  std::size_t high_count;
  double low_cut;   // largest value taken from the bottom
  double high_cut;  // smallest value taken from the top
};

struct IbossResult {
  SubsampleSelection selection;
  std::vector<IbossCut> cuts;  // one per processed column, in processing order
};

/// r = floor(n_target / 2p) per side and variable. The n_target - 2pr
/// leftover points go one extra bottom-side point per variable from the
/// first, then one extra top-side point per variable. Ties at a cut favour
/// the lowest row index. An empty column_order means dataset order.
/// Throws InvalidInput if n_target > N, n_target < 2p, or column_order is not
/// a permutation of the feature columns.
IbossResult run_iboss(const Dataset& data, std::size_t n_target, std::vector<Index> column_order = {});

struct IbossBound {
  double det;    // det M(delta), intercept plus covariates, scaled by 1/sigma^2
  double bound;  // 4 (n_d / 4 sigma^2)^{p+1} prod_j range_j^2 from the full data
};

IbossBound iboss_det_bound(const Dataset& data, const SubsampleSelection& selection, std::size_t n_target,
                           double sigma = 1.0);

}  // namespace subsel
