#pragma once

// Optimality criteria and optimality checks: classical D/A/I, the minimax
// robust losses I_nu and D_nu, bias- and confounder-aware mean squared error
// losses, and equivalence-theorem style verification over a finite grid.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsel/model.hpp"

namespace subsel {

enum class CriterionName { D, I, A, Inu, Dnu, traceR, detR_bias, detR_conf };

std::string_view to_string(CriterionName name) noexcept;

struct CriterionValue {
  CriterionName name;
  double value;
  std::map<std::string, double> meta;
};

/// row' M^{-1} row over the full (f, h, g) row. Throws SingularMatrix when M
/// is singular or its condition number exceeds 1e12.
double variance_function(const ModelSpec& spec, const DesignMeasure& design, const DesignPoint& point);

/// f' M11^{-1} f, the variance function of the f-part alone.
double variance_function_f_only(const ModelSpec& spec, const DesignMeasure& design,
                                const DesignPoint& point);

/// Variance function with M^{-1} factored once, for repeated evaluation.
class VarianceFunction {
 public:
  VarianceFunction(const ModelSpec& spec, const InformationMatrix& info);
  double operator()(const DesignPoint& point) const;
  double operator()(const Vector& row) const { return row.dot(inverse_ * row); }
  const Matrix& inverse() const noexcept { return inverse_; }

 private:
  const ModelSpec* spec_;
  Matrix inverse_;
};

/// log det M; meta: det, singular (0/1). Singular input gives -inf.
CriterionValue d_criterion(const InformationMatrix& info);
/// tr M^{-1}.
CriterionValue a_criterion(const InformationMatrix& info);
/// Average of the variance function over the grid.
CriterionValue i_criterion(const ModelSpec& spec, const DesignMeasure& design, const CandidateGrid& grid);

struct GetVerdict {
  bool is_optimal;
  double max_variance;
  double bound;  // k_eff
  Index worst_index;
  DesignPoint worst_point;
  double tolerance;
};

/// Scans the variance function over every grid point. Optimal iff the
/// maximum equals k_eff within tol. k_eff defaults to rank(M) at 1e-9 ||M||.
GetVerdict get_check(const ModelSpec& spec, const DesignMeasure& design, const CandidateGrid& grid,
                     std::optional<Index> k_eff = std::nullopt, double tol = 1e-6, unsigned threads = 1);

/// Regression matrix over a finite design space with its orthonormal factor.
class RobustContext {
 public:
  /// f_matrix: one row per candidate point. nu in [0, 1].
  RobustContext(Matrix f_matrix, double nu);
  /// Rows are the full model rows of every grid point.
  static RobustContext from_grid(const ModelSpec& spec, const CandidateGrid& grid, double nu);

  const Matrix& f_matrix() const noexcept { return f_; }
  const Matrix& q_matrix() const noexcept { return q_; }
  double nu() const noexcept { return nu_; }
  Index n() const noexcept { return q_.rows(); }
  Index p() const noexcept { return q_.cols(); }
  RobustContext with_nu(double nu) const;

 private:
  RobustContext() = default;
  Matrix f_;
  Matrix q_;
  double nu_ = 0.0;
};

struct WiensLosses {
  CriterionValue i_nu;
  CriterionValue d_nu;
  double lambda_u;      // lambda_max(U)
  double lambda;        // lambda_max(R^{1/2}(U - I)R^{1/2})
  Vector eigenvector;   // unit eigenvector for lambda
};

/// I_nu and D_nu for candidate-point weights (length ctx.n()).
WiensLosses wiens_losses(const RobustContext& ctx, const Vector& weights);

/// Same losses from the moments R = Q'DQ and S = Q'D^2 Q.
WiensLosses wiens_losses_from_moments(const Matrix& r, const Matrix& s, double nu);

/// Weight vector over the grid for a measure supported on grid points.
/// Throws InvalidInput if a support point is not on the grid.
Vector weights_on_grid(const ModelSpec& spec, const CandidateGrid& grid, const DesignMeasure& design);

enum class CrossTerm {
  derivation,  // 2 (N/sigma)^2 tr S4
  displayed,   // (N/sigma)^2 tr S4
};

/// tr R = tr M11^{-1} + (N/sigma)^2 (tr S2 + tr S3 + c tr S4).
CriterionValue trace_r(const InformationMatrix& info, const BiasSpec& bias,
                       CrossTerm cross = CrossTerm::derivation);

/// det R = det(M11^{-1}) (1 + (N/sigma)^2 psi' M21 M11^{-1} M12 psi);
/// meta "penalty" is the quadratic form psi' M21 M11^{-1} M12 psi.
CriterionValue det_r_bias(const InformationMatrix& info, const BiasSpec& bias);
/// The confounder analogue with phi and M13.
CriterionValue det_r_confounder(const InformationMatrix& info, const BiasSpec& bias);

struct MontepiedraVerdict {
  bool holds;
  Index worst_index;
  DesignPoint worst_point;
  double max_excess;  // max over grid of lhs - rhs
};

/// Checks d1(x) + lambda* d2(x) <= p - lambda* B at every grid point, with
///   d1 = f' M11^{-1} f,  d2 = phi_fn^2 - 2 phi_fn r,  r = (N/sigma) psi' h(x),
///   phi_fn(x) = sum_i w_i f(x)' M11^{-1} f(x_i).
MontepiedraVerdict montepiedra_check(const ModelSpec& spec, const DesignMeasure& design,
                                     const BiasSpec& bias, double budget, double lambda_star,
                                     const CandidateGrid& grid, double tol);

/// phi' G' F M11^{-2} F' G phi with F = [f(x)], G = [g(z_x)], M11 the f-moment
/// matrix of the uniform measure on the data points.
double confounder_loss(const ModelSpec& spec, const std::vector<Vector>& data_points,
                       const std::vector<Vector>& assignment, const BiasSpec& bias);

struct AssignmentScenario {
  std::vector<Vector> z;  // one z per data point
  double probability;
};

/// E over scenarios of the maximum over phi candidates of confounder_loss.
double confounder_expected_worst(const ModelSpec& spec, const std::vector<Vector>& data_points,
                                 const std::vector<AssignmentScenario>& scenarios,
                                 const std::vector<Vector>& phi_candidates);

struct ConfounderMinimax {
  double value;
  std::size_t best_distribution;
  std::vector<double> per_distribution;
};

/// Minimum over candidate randomisation distributions of the expected worst loss.
ConfounderMinimax confounder_minimax(const ModelSpec& spec, const std::vector<Vector>& data_points,
                                     const std::vector<std::vector<AssignmentScenario>>& distributions,
                                     const std::vector<Vector>& phi_candidates);

/// sum over the grid of f(x) h(x)' psi; zero under the identifiability
/// constraint of the general bias model. Reported, not enforced.
Vector bias_identifiability(const ModelSpec& spec, const CandidateGrid& grid, const Vector& psi);

}  // namespace subsel
