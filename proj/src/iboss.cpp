#include "subsel/iboss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "subsel/error.hpp"
#include "subsel/linalg.hpp"

namespace subsel {

namespace {

struct Keyed {
  double value;
  std::size_t row;
};

// Moves the `count` best entries to the front; "best" is smallest value (or
// largest when `top`), ties broken by row index.
void partial_select(std::vector<Keyed>& pool, std::size_t count, bool top) {
  if (count == 0 || count >= pool.size()) return;
  auto order = [top](const Keyed& a, const Keyed& b) {
    if (a.value != b.value) return top ? a.value > b.value : a.value < b.value;
    return a.row < b.row;
  };
  std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count - 1), pool.end(), order);
}

}  // namespace

IbossResult run_iboss(const Dataset& data, std::size_t n_target, std::vector<Index> column_order) {
  const auto n_rows = static_cast<std::size_t>(data.size());
  const Index p = data.dx();
  if (p < 1) throw InvalidInput("iboss: dataset has no covariates");
  if (column_order.empty()) {
    column_order.resize(static_cast<std::size_t>(p));
    std::iota(column_order.begin(), column_order.end(), Index{0});
  }
  {
    std::vector<Index> sorted = column_order;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = sorted.size() == static_cast<std::size_t>(p);
    for (std::size_t i = 0; permutation && i < sorted.size(); ++i) permutation = sorted[i] == static_cast<Index>(i);
    if (!permutation) throw InvalidInput("iboss: column order must be a permutation of 0.." + std::to_string(p - 1));
  }
  if (n_target > n_rows) {
    throw InvalidInput("iboss: n_target " + std::to_string(n_target) + " exceeds dataset size " +
                       std::to_string(n_rows));
  }
  const auto pp = static_cast<std::size_t>(p);
  if (n_target < 2 * pp) throw InvalidInput("iboss: n_target must be at least 2p = " + std::to_string(2 * pp));

  const std::size_t r = n_target / (2 * pp);
  std::size_t leftover = n_target - 2 * pp * r;
  std::vector<std::size_t> low(pp, r), high(pp, r);
  for (std::size_t j = 0; j < pp && leftover > 0; ++j, --leftover) ++low[j];
  for (std::size_t j = 0; j < pp && leftover > 0; ++j, --leftover) ++high[j];

  IbossResult result;
  result.selection.algorithm = "iboss";
  result.selection.indices.reserve(n_target);
  std::vector<char> taken(n_rows, 0);
  std::vector<Keyed> pool;
  pool.reserve(n_rows);

  auto take = [&](Index column, std::size_t count, bool top) {
    pool.clear();
    for (std::size_t i = 0; i < n_rows; ++i) {
      if (!taken[i]) pool.push_back({data.x(static_cast<Index>(i), column), i});
    }
    partial_select(pool, count, top);
    std::vector<Keyed> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(chosen.begin(), chosen.end(), [top](const Keyed& a, const Keyed& b) {
      if (a.value != b.value) return top ? a.value > b.value : a.value < b.value;
      return a.row < b.row;
    });
    for (const Keyed& k : chosen) {
      taken[k.row] = 1;
      result.selection.indices.push_back(k.row);
    }
    return chosen.empty() ? std::nan("") : chosen.back().value;
  };

  for (std::size_t j = 0; j < pp; ++j) {
    const Index column = column_order[j];
    IbossCut cut{column, low[j], high[j], 0.0, 0.0};
    cut.low_cut = take(column, low[j], false);
    cut.high_cut = take(column, high[j], true);
    result.cuts.push_back(cut);
  }
  return result;
}

IbossBound iboss_det_bound(const Dataset& data, const SubsampleSelection& selection, std::size_t n_target,
                           double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  if (selection.indices.empty()) throw InvalidInput("empty selection");
  const Index p = data.dx();
  Matrix m = Matrix::Zero(p + 1, p + 1);
  Vector row(p + 1);
  for (std::size_t index : selection.indices) {
    if (index >= static_cast<std::size_t>(data.size())) throw InvalidInput("selection index out of range");
    row(0) = 1.0;
    row.tail(p) = data.x.row(static_cast<Index>(index)).transpose();
    m.noalias() += row * row.transpose();
  }
  m /= sigma * sigma;
  const LogDet ld = log_det_psd(0.5 * (m + m.transpose()));

  const double scale = static_cast<double>(n_target) / (4.0 * sigma * sigma);
  double bound = 4.0 * std::pow(scale, static_cast<double>(p + 1));
  for (Index j = 0; j < p; ++j) {
    const double range = data.x.col(j).maxCoeff() - data.x.col(j).minCoeff();
    bound *= range * range;
  }
  return {ld.singular ? 0.0 : ld.det, bound};
}

}  // namespace subsel
