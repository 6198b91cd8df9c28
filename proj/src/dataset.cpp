#include "subsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "subsel/error.hpp"

namespace subsel {

bool Dataset::binary_response() const {
  if (!has_response()) return false;
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) return false;
  }
  return true;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.response_name = response_name;
  out.confounder_names = confounder_names;
  const auto n = static_cast<Index>(rows.size());
  out.x.resize(n, x.cols());
  out.z.resize(n, z.cols());
  if (has_response()) out.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<Index>(rows[static_cast<std::size_t>(i)]);
    if (r >= size()) throw InvalidInput("subset row out of range");
    out.x.row(i) = x.row(r);
    if (z.cols() > 0) out.z.row(i) = z.row(r);
    if (has_response()) out.y(i) = y(r);
  }
  return out;
}

namespace {

// Splits one CSV record. Handles quoted fields with embedded commas and
// doubled quotes; records spanning several lines are not supported.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

std::optional<double> parse_number(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvColumns& columns) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw EmptyDataset("'" + path.string() + "' has no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_record(line);
  for (auto& name : header) name = trim(name);

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);
  auto locate = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) throw ConfigError("column '" + name + "' not found in '" + path.string() + "'");
    return it->second;
  };

  Dataset data;
  std::vector<std::size_t> feature_cols;
  std::vector<std::size_t> confounder_cols;
  std::optional<std::size_t> response_col;
  if (columns.response) {
    response_col = locate(*columns.response);
    data.response_name = *columns.response;
  }
  for (const auto& name : columns.confounders) confounder_cols.push_back(locate(name));
  data.confounder_names = columns.confounders;
  if (columns.features.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const bool used = (response_col && *response_col == i) ||
                        std::find(confounder_cols.begin(), confounder_cols.end(), i) != confounder_cols.end();
      if (!used) {
        feature_cols.push_back(i);
        data.feature_names.push_back(header[i]);
      }
    }
  } else {
    for (const auto& name : columns.features) feature_cols.push_back(locate(name));
    data.feature_names = columns.features;
  }
  if (feature_cols.empty()) throw ConfigError("no feature columns selected");

  std::vector<double> xs, zs, ys;
  std::size_t kept = 0;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_record(line);
    if (cells.size() != header.size()) {
      ++data.dropped_rows;
      continue;
    }
    for (auto& cell : cells) cell = trim(cell);
    // Only cells of used columns count as missing.
    auto value_of = [&](std::size_t col) -> std::optional<double> {
      if (is_missing(cells[col])) return std::nullopt;
      const auto v = parse_number(cells[col]);
      if (!v) {
        throw ParseError("non-numeric cell '" + cells[col] + "' at row " + std::to_string(row_number) +
                             ", column " + std::to_string(col + 1),
                         row_number, col + 1);
      }
      return v;
    };
    std::vector<double> row_x, row_z;
    std::optional<double> row_y;
    bool drop = false;
    for (std::size_t col : feature_cols) {
      const auto v = value_of(col);
      drop = drop || !v;
      row_x.push_back(v.value_or(0.0));
    }
    for (std::size_t col : confounder_cols) {
      const auto v = value_of(col);
      drop = drop || !v;
      row_z.push_back(v.value_or(0.0));
    }
    if (response_col) {
      row_y = value_of(*response_col);
      drop = drop || !row_y;
    }
    if (drop) {
      ++data.dropped_rows;
      continue;
    }
    xs.insert(xs.end(), row_x.begin(), row_x.end());
    zs.insert(zs.end(), row_z.begin(), row_z.end());
    if (row_y) ys.push_back(*row_y);
    ++kept;
  }
  if (kept == 0) throw EmptyDataset("'" + path.string() + "' contains no complete data rows");

  const auto n = static_cast<Index>(kept);
  const auto dx = static_cast<Index>(feature_cols.size());
  const auto dz = static_cast<Index>(confounder_cols.size());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  data.x = Eigen::Map<const RowMajor>(xs.data(), n, dx);
  data.z = dz > 0 ? Matrix(Eigen::Map<const RowMajor>(zs.data(), n, dz)) : Matrix(n, 0);
  if (response_col) data.y = Eigen::Map<const Vector>(ys.data(), n);
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  std::vector<std::string> header = data.feature_names;
  header.insert(header.end(), data.confounder_names.begin(), data.confounder_names.end());
  if (data.response_name) header.push_back(*data.response_name);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Index r = 0; r < data.size(); ++r) {
    bool first = true;
    auto emit = [&](double v) {
      out << (first ? "" : ",") << format_number(v);
      first = false;
    };
    for (Index c = 0; c < data.x.cols(); ++c) emit(data.x(r, c));
    for (Index c = 0; c < data.z.cols(); ++c) emit(data.z(r, c));
    if (data.has_response()) emit(data.y(r));
    out << '\n';
  }
}

std::pair<Dataset, Standardization> standardize(const Dataset& data) {
  const Index n = data.size();
  if (n < 2) throw DegenerateColumn("standardization needs at least two rows");
  Standardization t;
  t.mean = data.x.colwise().mean().transpose();
  t.sd.resize(data.dx());
  Dataset out = data;
  for (Index c = 0; c < data.dx(); ++c) {
    const Vector centered = data.x.col(c).array() - t.mean(c);
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      const std::string name = static_cast<std::size_t>(c) < data.feature_names.size()
                                   ? data.feature_names[static_cast<std::size_t>(c)]
                                   : std::to_string(c);
      throw DegenerateColumn("column '" + name + "' has zero variance");
    }
    t.sd(c) = sd;
    out.x.col(c) = centered / sd;
  }
  return {std::move(out), std::move(t)};
}

Dataset unstandardize(const Dataset& data, const Standardization& transform) {
  if (transform.mean.size() != data.dx() || transform.sd.size() != data.dx()) {
    throw InvalidInput("standardization parameters do not match the feature count");
  }
  Dataset out = data;
  for (Index c = 0; c < data.dx(); ++c) {
    out.x.col(c) = (data.x.col(c).array() * transform.sd(c) + transform.mean(c)).matrix();
  }
  return out;
}

}  // namespace subsel
