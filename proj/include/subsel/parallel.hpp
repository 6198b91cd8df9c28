#pragma once

// Deterministic data-parallel helpers. Work is split into contiguous chunks;
// reductions combine chunk results in chunk order and break ties toward the
// lowest index, so results do not depend on the thread count.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

#include "subsel/types.hpp"

namespace subsel {

/// fn(begin, end) over [0, n) split across `threads` workers.
template <class Fn>
void parallel_chunks(Index n, unsigned threads, Fn&& fn) {
  const Index workers = std::clamp<Index>(static_cast<Index>(threads), 1, std::max<Index>(n, 1));
  if (workers <= 1 || n < 1024) {
    fn(Index{0}, n);
    return;
  }
  const Index chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

struct ArgMax {
  Index index = -1;
  double value = -std::numeric_limits<double>::infinity();
};

/// Index maximising score(i) over [0, n); ties go to the lowest index.
/// Indices for which skip(i) is true are ignored. NaN scores never win.
template <class Score, class Skip>
ArgMax parallel_argmax(Index n, unsigned threads, Score&& score, Skip&& skip) {
  const Index workers = std::max<Index>(1, static_cast<Index>(threads));
  std::vector<ArgMax> partial(static_cast<std::size_t>(workers));
  const Index chunk = (n + workers - 1) / std::max<Index>(workers, 1);
  auto scan = [&](Index begin, Index end, ArgMax& best) {
    for (Index i = begin; i < end; ++i) {
      if (skip(i)) continue;
      const double v = score(i);
      if (v > best.value || (best.index < 0 && v == best.value)) best = {i, v};
    }
  };
  if (workers == 1 || n < 1024) {
    ArgMax best;
    scan(0, n, best);
    return best;
  }
  {
    std::vector<std::jthread> pool;
    for (Index w = 0; w < workers; ++w) {
      const Index begin = w * chunk;
      const Index end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end, w] { scan(begin, end, partial[static_cast<std::size_t>(w)]); });
    }
  }
  ArgMax best;
  for (const ArgMax& p : partial) {
    if (p.index >= 0 && (p.value > best.value || best.index < 0)) best = p;
  }
  return best;
}

template <class Score>
ArgMax parallel_argmax(Index n, unsigned threads, Score&& score) {
  return parallel_argmax(n, threads, std::forward<Score>(score), [](Index) { return false; });
}

}  // namespace subsel
