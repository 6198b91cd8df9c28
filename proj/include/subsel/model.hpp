#pragma once

// The linear model with bias and confounder terms,
//
//     Y(x, z) = f(x)' theta + h(x)' psi + g(z)' phi + eps,
//
// together with design measures over finite candidate sets and the
// partitioned information matrix they induce.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subsel/dataset.hpp"
#include "subsel/types.hpp"

namespace subsel {

/// A vector-valued regression function of a point.
class Basis {
 public:
  using Fn = std::function<Vector(const Vector&)>;

  Basis(std::string name, Index input_dim, Index output_dim, bool has_constant, Fn fn);

  const std::string& name() const noexcept { return name_; }
  Index input_dim() const noexcept { return input_dim_; }
  Index output_dim() const noexcept { return output_dim_; }
  /// Whether one of the outputs is the constant 1. Nothing injects intercepts
  /// automatically.
  bool has_constant() const noexcept { return has_constant_; }

  /// Throws InvalidInput on arity mismatch or non-finite output.
  Vector operator()(const Vector& point) const;

 private:
  std::string name_;
  Index input_dim_;
  Index output_dim_;
  bool has_constant_;
  Fn fn_;
};

namespace basis {

/// (1, s*x_1, ..., s*x_d), the constant optional.
Basis linear(Index dim, bool intercept = true, double scale = 1.0);
/// (1, x_j, ..., x_j^degree) of one coordinate, degree in [0, 3].
Basis polynomial(Index dim, Index variable, int degree, bool intercept = true);

enum class Trig { sin, cos };
/// s * trig(a x_j^2 + b x_j + c).
Basis trig(Index dim, Index variable, Trig fn, double a, double b = 0.0, double c = 0.0,
           double scale = 1.0);
/// Outputs of several bases on the same input, stacked.
Basis concat(std::vector<Basis> parts);

}  // namespace basis

class ModelSpec {
 public:
  explicit ModelSpec(Basis f, std::optional<Basis> h = std::nullopt,
                     std::optional<Basis> g = std::nullopt);

  const Basis& f() const noexcept { return f_; }
  const std::optional<Basis>& h() const noexcept { return h_; }
  const std::optional<Basis>& g() const noexcept { return g_; }

  Index p() const noexcept { return f_.output_dim(); }
  Index m() const noexcept { return h_ ? h_->output_dim() : 0; }
  Index q() const noexcept { return g_ ? g_->output_dim() : 0; }
  Index k_total() const noexcept { return p() + m() + q(); }
  Index dx() const noexcept { return f_.input_dim(); }
  Index dz() const noexcept { return g_ ? g_->input_dim() : 0; }

  /// The same model with the confounder term removed.
  ModelSpec without_confounders() const { return ModelSpec(f_, h_); }
  /// f alone.
  ModelSpec f_only() const { return ModelSpec(f_); }

 private:
  Basis f_;
  std::optional<Basis> h_;
  std::optional<Basis> g_;
};

/// A candidate point (x, z); z is empty when the model has no confounders.
struct DesignPoint {
  Vector x;
  Vector z;

  bool operator==(const DesignPoint& other) const;
};

/// (f(x), h(x), g(z)); absent blocks contribute nothing. z must be supplied
/// exactly when q > 0.
Vector eval_row(const ModelSpec& spec, const Vector& x);
Vector eval_row(const ModelSpec& spec, const Vector& x, const Vector& z);
Vector eval_row(const ModelSpec& spec, const DesignPoint& point);

/// Probability weights on distinct candidate points.
class DesignMeasure {
 public:
  /// Duplicated points are merged by summing their weights (first occurrence
  /// keeps its position). Weights must be non-negative and sum to one within
  /// 1e-12.
  DesignMeasure(std::vector<DesignPoint> points, Vector weights);

  static DesignMeasure uniform(std::vector<DesignPoint> points);
  /// (1 - alpha) * a + alpha * b.
  static DesignMeasure mix(const DesignMeasure& a, const DesignMeasure& b, double alpha);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<DesignPoint>& points() const noexcept { return points_; }
  const DesignPoint& point(std::size_t i) const { return points_.at(i); }
  const Vector& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_(static_cast<Index>(i)); }

 private:
  std::vector<DesignPoint> points_;
  Vector weights_;
};

struct GridAxis {
  std::string name;
  std::vector<double> levels;
  bool confounder = false;  // a z coordinate rather than an x coordinate
};

/// A finite candidate set, stored one point per row: x coordinates first,
/// then z coordinates.
class CandidateGrid {
 public:
  /// Cross product of the axes in row-major order (last axis fastest).
  /// Each axis must be non-empty and strictly increasing (ConfigError).
  static CandidateGrid cross(std::vector<GridAxis> axes);
  /// Explicit point list; bounds are the per-column extremes.
  static CandidateGrid from_points(Matrix points, Index x_dims);

  Index size() const noexcept { return points_.rows(); }
  Index x_dims() const noexcept { return x_dims_; }
  Index z_dims() const noexcept { return points_.cols() - x_dims_; }
  const Matrix& points() const noexcept { return points_; }
  const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  DesignPoint point(Index i) const;
  /// Row i restricted to its x coordinates.
  Vector x(Index i) const { return points_.row(i).head(x_dims_).transpose(); }

 private:
  Matrix points_;
  Index x_dims_ = 0;
  std::vector<GridAxis> axes_;
  Vector lower_;
  Vector upper_;
};

/// build_grid: alias of CandidateGrid::cross.
CandidateGrid build_grid(std::vector<GridAxis> axes);

/// `count` equispaced levels on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Symmetric moment matrix partitioned conformally with (f, h, g).
class InformationMatrix {
 public:
  /// Rejects non-square input, p + m + q != size, or asymmetry above
  /// 1e-12 * max(1, max|a_ij|). The stored matrix is exactly symmetric.
  InformationMatrix(Matrix full, Index p, Index m = 0, Index q = 0);

  const Matrix& full() const noexcept { return full_; }
  Index p() const noexcept { return p_; }
  Index m() const noexcept { return m_; }
  Index q() const noexcept { return q_; }
  Index size() const noexcept { return full_.rows(); }

  /// Blocks indexed 1 (f), 2 (h), 3 (g), as views into the full matrix.
  Eigen::Block<const Matrix> block(int row_part, int col_part) const;
  Eigen::Block<const Matrix> m11() const { return block(1, 1); }
  Eigen::Block<const Matrix> m12() const { return block(1, 2); }
  Eigen::Block<const Matrix> m13() const { return block(1, 3); }
  Eigen::Block<const Matrix> m21() const { return block(2, 1); }
  Eigen::Block<const Matrix> m22() const { return block(2, 2); }
  Eigen::Block<const Matrix> m23() const { return block(2, 3); }
  Eigen::Block<const Matrix> m31() const { return block(3, 1); }
  Eigen::Block<const Matrix> m32() const { return block(3, 2); }
  Eigen::Block<const Matrix> m33() const { return block(3, 3); }

  /// Smallest eigenvalue >= -rel_tol * ||full||.
  bool is_psd(double rel_tol = 1e-10) const;

 private:
  Matrix full_;
  Index p_, m_, q_;
};

/// sum_i w_i r_i r_i' with r_i = eval_row at the i-th support point.
InformationMatrix information_matrix(const ModelSpec& spec, const DesignMeasure& design);

/// (1/sigma^2) sum over selected rows of r_i r_i'. Confounder columns of the
/// data are used when q > 0. Empty, repeated or out-of-range selections raise
/// InvalidInput.
InformationMatrix information_matrix_from_selection(const ModelSpec& spec, const Dataset& data,
                                                    const std::vector<std::size_t>& selection,
                                                    double sigma = 1.0);

/// Model matrix with one eval_row per dataset row.
Matrix model_matrix(const ModelSpec& spec, const Dataset& data);
Matrix model_matrix(const ModelSpec& spec, const CandidateGrid& grid);

/// Grid point i as seen by the model: z coordinates dropped when q == 0.
DesignPoint grid_point(const ModelSpec& spec, const CandidateGrid& grid, Index i);

/// Point of dataset row i (z filled only when the spec has confounders).
DesignPoint data_point(const ModelSpec& spec, const Dataset& data, Index row);

/// Bias and confounder coefficients with the scaling constants N and sigma.
struct BiasSpec {
  Vector psi;  // length m
  Vector phi;  // length q
  double sigma = 1.0;
  std::size_t n_total = 1;

  double n_over_sigma() const noexcept { return static_cast<double>(n_total) / sigma; }
  /// Throws InvalidInput when sigma <= 0, n_total == 0 or lengths mismatch.
  void validate(Index m, Index q) const;
};

}  // namespace subsel
