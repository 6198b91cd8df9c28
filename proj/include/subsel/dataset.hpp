#pragma once

// Tabular data: a tall matrix of observed covariates with an optional
// response and, for simulated data only, the normally unobserved confounders.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "subsel/types.hpp"

namespace subsel {

struct Dataset {
  std::vector<std::string> feature_names;
  Matrix x;  // N x dx

  std::optional<std::string> response_name;
  Vector y;  // length N when a response is present, else empty

  std::vector<std::string> confounder_names;
  Matrix z;  // N x dz, dz == 0 when absent

  /// Rows dropped during ingestion because of missing entries.
  std::size_t dropped_rows = 0;

  Index size() const noexcept { return x.rows(); }
  Index dx() const noexcept { return x.cols(); }
  Index dz() const noexcept { return z.cols(); }
  bool has_response() const noexcept { return response_name.has_value(); }
  bool has_confounders() const noexcept { return z.cols() > 0; }
  /// True when every response value is exactly 0 or 1.
  bool binary_response() const;

  /// Row subset in the given order.
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

struct CsvColumns {
  std::optional<std::string> response;
  std::vector<std::string> features;     // empty: every column not used elsewhere
  std::vector<std::string> confounders;
};

/// Reads an RFC-4180 style CSV with a header row. Rows with missing cells
/// (empty, NA, NaN, null) or a wrong field count are dropped and counted;
/// any other non-numeric cell is a ParseError carrying its 1-based row and
/// column. Missing named columns raise ConfigError; no surviving rows raise
/// EmptyDataset.
Dataset load_csv(const std::filesystem::path& path, const CsvColumns& columns);

/// Writes features, then confounders, then the response.
void write_csv(const Dataset& data, const std::filesystem::path& path);

struct Standardization {
  Vector mean;
  Vector sd;  // sample standard deviation (n - 1 divisor)
};

/// Centers and scales every feature column. Response and confounders are left
/// untouched. Throws DegenerateColumn for zero-variance columns.
std::pair<Dataset, Standardization> standardize(const Dataset& data);

/// Maps standardized features back to the original scale.
Dataset unstandardize(const Dataset& data, const Standardization& transform);

}  // namespace subsel
