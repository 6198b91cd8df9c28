#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace subsel {

/// Rows chosen from a dataset, in the order they were selected.
struct SubsampleSelection {
  std::string algorithm;
  std::vector<std::size_t> indices;
};

}  // namespace subsel
