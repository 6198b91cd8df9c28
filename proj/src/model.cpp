#include "subsel/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_set>

#include "subsel/error.hpp"

namespace subsel {

Basis::Basis(std::string name, Index input_dim, Index output_dim, bool has_constant, Fn fn)
    : name_(std::move(name)),
      input_dim_(input_dim),
      output_dim_(output_dim),
      has_constant_(has_constant),
      fn_(std::move(fn)) {
  if (input_dim_ < 0 || output_dim_ < 0) throw InvalidInput("basis dimensions must be non-negative");
  if (!fn_) throw InvalidInput("basis '" + name_ + "' has no evaluation function");
}

Vector Basis::operator()(const Vector& point) const {
  if (point.size() != input_dim_) {
    throw InvalidInput("basis '" + name_ + "' expects a point of length " +
                       std::to_string(input_dim_) + ", got " + std::to_string(point.size()));
  }
  Vector out = fn_(point);
  if (out.size() != output_dim_) {
    throw InvalidInput("basis '" + name_ + "' returned " + std::to_string(out.size()) +
                       " values, declared " + std::to_string(output_dim_));
  }
  if (!out.allFinite()) throw InvalidInput("basis '" + name_ + "' produced a non-finite value");
  return out;
}

namespace basis {

Basis linear(Index dim, bool intercept, double scale) {
  const Index offset = intercept ? 1 : 0;
  return Basis("linear", dim, dim + offset, intercept, [=](const Vector& x) {
    Vector out(x.size() + offset);
    if (intercept) out(0) = 1.0;
    out.tail(x.size()) = scale * x;
    return out;
  });
}

Basis polynomial(Index dim, Index variable, int degree, bool intercept) {
  if (degree < 0 || degree > 3) throw InvalidInput("polynomial degree must be in [0, 3]");
  if (variable < 0 || variable >= dim) throw InvalidInput("polynomial variable out of range");
  if (degree == 0 && !intercept) throw InvalidInput("polynomial of degree 0 without intercept is empty");
  const Index first = intercept ? 0 : 1;
  const Index out_dim = degree + 1 - first;
  return Basis("polynomial" + std::to_string(degree), dim, out_dim, intercept,
               [=](const Vector& x) {
                 Vector out(out_dim);
                 double power = 1.0;
                 for (Index k = 0; k <= degree; ++k) {
                   if (k >= first) out(k - first) = power;
                   power *= x(variable);
                 }
                 return out;
               });
}

Basis trig(Index dim, Index variable, Trig fn, double a, double b, double c, double scale) {
  if (variable < 0 || variable >= dim) throw InvalidInput("trig variable out of range");
  const bool is_sin = fn == Trig::sin;
  return Basis(is_sin ? "sin" : "cos", dim, 1, false, [=](const Vector& x) {
    const double t = x(variable);
    const double arg = a * t * t + b * t + c;
    Vector out(1);
    out(0) = scale * (is_sin ? std::sin(arg) : std::cos(arg));
    return out;
  });
}

Basis concat(std::vector<Basis> parts) {
  if (parts.empty()) throw InvalidInput("concat of zero bases");
  const Index in_dim = parts.front().input_dim();
  Index out_dim = 0;
  bool constant = false;
  std::string name;
  for (const Basis& part : parts) {
    if (part.input_dim() != in_dim) throw InvalidInput("concat: bases disagree on input dimension");
    out_dim += part.output_dim();
    constant = constant || part.has_constant();
    name += (name.empty() ? "" : "+") + part.name();
  }
  return Basis(name, in_dim, out_dim, constant, [parts, out_dim](const Vector& x) {
    Vector out(out_dim);
    Index at = 0;
    for (const Basis& part : parts) {
      out.segment(at, part.output_dim()) = part(x);
      at += part.output_dim();
    }
    return out;
  });
}

}  // namespace basis

ModelSpec::ModelSpec(Basis f, std::optional<Basis> h, std::optional<Basis> g)
    : f_(std::move(f)), h_(std::move(h)), g_(std::move(g)) {
  if (f_.output_dim() == 0) throw InvalidInput("f basis must have at least one column");
  if (h_ && h_->input_dim() != f_.input_dim()) {
    throw InvalidInput("h basis must take the same x as f");
  }
  if (h_ && h_->output_dim() == 0) h_.reset();
  if (g_ && g_->output_dim() == 0) g_.reset();
}

bool DesignPoint::operator==(const DesignPoint& other) const {
  return x.size() == other.x.size() && z.size() == other.z.size() && x == other.x && z == other.z;
}

namespace {

Vector assemble_row(const ModelSpec& spec, const Vector& x, const Vector* z) {
  const bool want_z = spec.q() > 0;
  if (want_z && z == nullptr) throw InvalidInput("model has confounders but no z was supplied");
  if (!want_z && z != nullptr) throw InvalidInput("z supplied for a model without confounders");
  Vector row(spec.k_total());
  row.head(spec.p()) = spec.f()(x);
  if (spec.m() > 0) row.segment(spec.p(), spec.m()) = (*spec.h())(x);
  if (want_z) row.tail(spec.q()) = (*spec.g())(*z);
  return row;
}

}  // namespace

Vector eval_row(const ModelSpec& spec, const Vector& x) { return assemble_row(spec, x, nullptr); }

Vector eval_row(const ModelSpec& spec, const Vector& x, const Vector& z) {
  return assemble_row(spec, x, &z);
}

Vector eval_row(const ModelSpec& spec, const DesignPoint& point) {
  return assemble_row(spec, point.x, point.z.size() > 0 ? &point.z : nullptr);
}

namespace {

std::vector<double> point_key(const DesignPoint& point) {
  std::vector<double> key;
  key.reserve(static_cast<std::size_t>(point.x.size() + point.z.size() + 1));
  key.push_back(static_cast<double>(point.x.size()));
  key.insert(key.end(), point.x.data(), point.x.data() + point.x.size());
  key.insert(key.end(), point.z.data(), point.z.data() + point.z.size());
  return key;
}

}  // namespace

DesignMeasure::DesignMeasure(std::vector<DesignPoint> points, Vector weights) {
  if (points.size() != static_cast<std::size_t>(weights.size())) {
    throw InvalidInput("design measure: points and weights differ in length");
  }
  if (points.empty()) throw InvalidInput("design measure has no points");
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<double> merged;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights(static_cast<Index>(i));
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("design weights must be finite and non-negative");
    auto [it, inserted] = seen.emplace(point_key(points[i]), points_.size());
    if (inserted) {
      points_.push_back(std::move(points[i]));
      merged.push_back(w);
    } else {
      merged[it->second] += w;
    }
  }
  weights_ = Eigen::Map<const Vector>(merged.data(), static_cast<Index>(merged.size()));
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("design weights sum to " + std::to_string(total) + ", expected 1");
  }
}

DesignMeasure DesignMeasure::uniform(std::vector<DesignPoint> points) {
  const auto n = static_cast<Index>(points.size());
  if (n == 0) throw InvalidInput("uniform design over zero points");
  return DesignMeasure(std::move(points), Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

DesignMeasure DesignMeasure::mix(const DesignMeasure& a, const DesignMeasure& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("mixing weight must lie in [0, 1]");
  std::vector<DesignPoint> points = a.points();
  points.insert(points.end(), b.points().begin(), b.points().end());
  Vector weights(a.weights().size() + b.weights().size());
  weights << (1.0 - alpha) * a.weights(), alpha * b.weights();
  return DesignMeasure(std::move(points), std::move(weights));
}

CandidateGrid CandidateGrid::cross(std::vector<GridAxis> axes) {
  if (axes.empty()) throw ConfigError("grid needs at least one axis");
  for (const GridAxis& axis : axes) {
    if (axis.levels.empty()) throw ConfigError("grid axis '" + axis.name + "' is empty");
    for (std::size_t i = 1; i < axis.levels.size(); ++i) {
      if (axis.levels[i] == axis.levels[i - 1]) {
        throw ConfigError("grid axis '" + axis.name + "' has duplicate levels");
      }
      if (!(axis.levels[i] > axis.levels[i - 1])) {
        throw ConfigError("grid axis '" + axis.name + "' is not strictly increasing");
      }
    }
  }
  Index total = 1;
  for (const GridAxis& axis : axes) total *= static_cast<Index>(axis.levels.size());

  // Column of each axis in the stored point: x axes first, then z axes.
  std::vector<Index> column(axes.size());
  Index x_dims = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (!axes[a].confounder) column[a] = x_dims++;
  }
  Index next = x_dims;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].confounder) column[a] = next++;
  }

  CandidateGrid grid;
  grid.points_.resize(total, static_cast<Index>(axes.size()));
  grid.x_dims_ = x_dims;
  std::vector<std::size_t> digit(axes.size(), 0);
  for (Index row = 0; row < total; ++row) {
    for (std::size_t a = 0; a < axes.size(); ++a) grid.points_(row, column[a]) = axes[a].levels[digit[a]];
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++digit[a] < axes[a].levels.size()) break;
      digit[a] = 0;
    }
  }
  grid.lower_ = grid.points_.colwise().minCoeff().transpose();
  grid.upper_ = grid.points_.colwise().maxCoeff().transpose();
  grid.axes_ = std::move(axes);
  return grid;
}

CandidateGrid CandidateGrid::from_points(Matrix points, Index x_dims) {
  if (points.rows() == 0) throw ConfigError("grid needs at least one point");
  if (x_dims < 0 || x_dims > points.cols()) throw ConfigError("grid x dimension out of range");
  if (!points.allFinite()) throw ConfigError("grid points must be finite");
  CandidateGrid grid;
  grid.points_ = std::move(points);
  grid.x_dims_ = x_dims;
  grid.lower_ = grid.points_.colwise().minCoeff().transpose();
  grid.upper_ = grid.points_.colwise().maxCoeff().transpose();
  return grid;
}

DesignPoint CandidateGrid::point(Index i) const {
  DesignPoint pt;
  pt.x = points_.row(i).head(x_dims_).transpose();
  pt.z = points_.row(i).tail(points_.cols() - x_dims_).transpose();
  return pt;
}

CandidateGrid build_grid(std::vector<GridAxis> axes) { return CandidateGrid::cross(std::move(axes)); }

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

InformationMatrix::InformationMatrix(Matrix full, Index p, Index m, Index q)
    : full_(std::move(full)), p_(p), m_(m), q_(q) {
  if (full_.rows() != full_.cols()) throw InvalidInput("information matrix must be square");
  if (p < 0 || m < 0 || q < 0 || p + m + q != full_.rows()) {
    throw InvalidInput("information matrix size does not match p + m + q");
  }
  if (full_.size() > 0) {
    const double scale = std::max(1.0, full_.cwiseAbs().maxCoeff());
    if ((full_ - full_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidInput("information matrix is not symmetric");
    }
    full_ = (0.5 * (full_ + full_.transpose())).eval();
  }
}

Eigen::Block<const Matrix> InformationMatrix::block(int row_part, int col_part) const {
  auto offset = [this](int part) -> std::pair<Index, Index> {
    switch (part) {
      case 1: return {0, p_};
      case 2: return {p_, m_};
      case 3: return {p_ + m_, q_};
      default: throw InvalidInput("information-matrix block index must be 1, 2 or 3");
    }
  };
  const auto [r0, rn] = offset(row_part);
  const auto [c0, cn] = offset(col_part);
  return full_.block(r0, c0, rn, cn);
}

bool InformationMatrix::is_psd(double rel_tol) const {
  if (full_.size() == 0) return true;
  const Vector values = Eigen::SelfAdjointEigenSolver<Matrix>(full_, Eigen::EigenvaluesOnly).eigenvalues();
  return values(0) >= -rel_tol * full_.norm();
}

InformationMatrix information_matrix(const ModelSpec& spec, const DesignMeasure& design) {
  const Index k = spec.k_total();
  Matrix full = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < design.size(); ++i) {
    const Vector row = eval_row(spec, design.point(i));
    full.noalias() += design.weight(i) * (row * row.transpose());
  }
  return InformationMatrix(std::move(full), spec.p(), spec.m(), spec.q());
}

DesignPoint data_point(const ModelSpec& spec, const Dataset& data, Index row) {
  DesignPoint pt;
  pt.x = data.x.row(row).transpose();
  if (spec.q() > 0) {
    if (!data.has_confounders()) throw InvalidInput("model has confounders but the dataset has no z columns");
    pt.z = data.z.row(row).transpose();
  }
  return pt;
}

InformationMatrix information_matrix_from_selection(const ModelSpec& spec, const Dataset& data,
                                                    const std::vector<std::size_t>& selection,
                                                    double sigma) {
  if (selection.empty()) throw InvalidInput("empty selection");
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  std::unordered_set<std::size_t> seen;
  const Index k = spec.k_total();
  Matrix full = Matrix::Zero(k, k);
  for (std::size_t index : selection) {
    if (index >= static_cast<std::size_t>(data.size())) throw InvalidInput("selection index out of range");
    if (!seen.insert(index).second) throw InvalidInput("selection contains a repeated index");
    const Vector row = eval_row(spec, data_point(spec, data, static_cast<Index>(index)));
    full.noalias() += row * row.transpose();
  }
  full /= sigma * sigma;
  return InformationMatrix(std::move(full), spec.p(), spec.m(), spec.q());
}

Matrix model_matrix(const ModelSpec& spec, const Dataset& data) {
  Matrix out(data.size(), spec.k_total());
  for (Index i = 0; i < data.size(); ++i) out.row(i) = eval_row(spec, data_point(spec, data, i)).transpose();
  return out;
}

DesignPoint grid_point(const ModelSpec& spec, const CandidateGrid& grid, Index i) {
  DesignPoint pt = grid.point(i);
  if (spec.q() == 0) pt.z.resize(0);
  return pt;
}

Matrix model_matrix(const ModelSpec& spec, const CandidateGrid& grid) {
  Matrix out(grid.size(), spec.k_total());
  for (Index i = 0; i < grid.size(); ++i) out.row(i) = eval_row(spec, grid_point(spec, grid, i)).transpose();
  return out;
}

void BiasSpec::validate(Index m, Index q) const {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  if (n_total == 0) throw InvalidInput("n_total must be positive");
  if (psi.size() != m) throw InvalidInput("psi length does not match m");
  if (phi.size() != q) throw InvalidInput("phi length does not match q");
}

}  // namespace subsel
