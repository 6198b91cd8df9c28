#include "subsel/criteria.hpp"

#include <cmath>
#include <limits>

#include "subsel/error.hpp"
#include "subsel/linalg.hpp"
#include "subsel/parallel.hpp"

namespace subsel {

std::string_view to_string(CriterionName name) noexcept {
  switch (name) {
    case CriterionName::D: return "D";
    case CriterionName::I: return "I";
    case CriterionName::A: return "A";
    case CriterionName::Inu: return "Inu";
    case CriterionName::Dnu: return "Dnu";
    case CriterionName::traceR: return "traceR";
    case CriterionName::detR_bias: return "detR_bias";
    case CriterionName::detR_conf: return "detR_conf";
  }
  return "?";
}

VarianceFunction::VarianceFunction(const ModelSpec& spec, const InformationMatrix& info)
    : spec_(&spec), inverse_(spd_inverse(info.full(), "information matrix")) {}

double VarianceFunction::operator()(const DesignPoint& point) const {
  return (*this)(eval_row(*spec_, point));
}

double variance_function(const ModelSpec& spec, const DesignMeasure& design, const DesignPoint& point) {
  return VarianceFunction(spec, information_matrix(spec, design))(point);
}

double variance_function_f_only(const ModelSpec& spec, const DesignMeasure& design,
                                const DesignPoint& point) {
  const InformationMatrix info = information_matrix(spec, design);
  const Matrix inv = spd_inverse(info.m11(), "M11");
  const Vector f = spec.f()(point.x);
  return f.dot(inv * f);
}

CriterionValue d_criterion(const InformationMatrix& info) {
  const LogDet ld = log_det_psd(info.full());
  return {CriterionName::D, ld.log_det, {{"det", ld.det}, {"singular", ld.singular ? 1.0 : 0.0}}};
}

CriterionValue a_criterion(const InformationMatrix& info) {
  const Matrix inv = spd_inverse(info.full(), "information matrix");
  return {CriterionName::A, inv.trace(), {}};
}

CriterionValue i_criterion(const ModelSpec& spec, const DesignMeasure& design, const CandidateGrid& grid) {
  const VarianceFunction d(spec, information_matrix(spec, design));
  const Matrix rows = model_matrix(spec, grid);
  double total = 0.0;
  for (Index i = 0; i < rows.rows(); ++i) total += d(Vector(rows.row(i).transpose()));
  return {CriterionName::I, total / static_cast<double>(rows.rows()),
          {{"grid_points", static_cast<double>(rows.rows())}}};
}

GetVerdict get_check(const ModelSpec& spec, const DesignMeasure& design, const CandidateGrid& grid,
                     std::optional<Index> k_eff, double tol, unsigned threads) {
  if (grid.size() == 0) throw InvalidInput("get_check: empty grid");
  const InformationMatrix info = information_matrix(spec, design);
  const VarianceFunction d(spec, info);
  const Index bound = k_eff.value_or(numeric_rank(info.full(), 1e-9));
  const Matrix rows = model_matrix(spec, grid);
  const ArgMax best = parallel_argmax(rows.rows(), threads, [&](Index i) {
    const Vector row = rows.row(i).transpose();
    return d(row);
  });
  if (best.index < 0) throw SingularMatrix("variance function is not finite on the grid", 0.0);
  GetVerdict verdict;
  verdict.max_variance = best.value;
  verdict.bound = static_cast<double>(bound);
  verdict.worst_index = best.index;
  verdict.worst_point = grid_point(spec, grid, best.index);
  verdict.tolerance = tol;
  verdict.is_optimal = std::abs(best.value - verdict.bound) <= tol;
  return verdict;
}

RobustContext::RobustContext(Matrix f_matrix, double nu) : f_(std::move(f_matrix)), nu_(nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw InvalidInput("nu must lie in [0, 1]");
  if (f_.rows() < f_.cols() || f_.cols() == 0) {
    throw InvalidInput("regression matrix needs at least as many rows as columns");
  }
  Eigen::HouseholderQR<Matrix> qr(f_);
  const Matrix r = qr.matrixQR().topRows(f_.cols()).triangularView<Eigen::Upper>();
  const double scale = r.diagonal().cwiseAbs().maxCoeff();
  if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-12 * scale)) {
    throw SingularMatrix("regression matrix over the design space is rank deficient",
                         r.diagonal().cwiseAbs().minCoeff());
  }
  q_ = qr.householderQ() * Matrix::Identity(f_.rows(), f_.cols());
}

RobustContext RobustContext::from_grid(const ModelSpec& spec, const CandidateGrid& grid, double nu) {
  return RobustContext(model_matrix(spec, grid), nu);
}

RobustContext RobustContext::with_nu(double nu) const {
  if (!(nu >= 0.0 && nu <= 1.0)) throw InvalidInput("nu must lie in [0, 1]");
  RobustContext out = *this;
  out.nu_ = nu;
  return out;
}

WiensLosses wiens_losses_from_moments(const Matrix& r, const Matrix& s, double nu) {
  const Index p = r.rows();
  const SymmetricRoots roots = symmetric_roots(r);
  const Matrix& r_inv = roots.inverse;
  Matrix u = r_inv * s * r_inv;
  u = 0.5 * (u + u.transpose()).eval();
  Matrix a = roots.inv_sqrt * s * roots.inv_sqrt - r;
  a = 0.5 * (a + a.transpose()).eval();

  const double lambda_u = symmetric_eigen(u).values(p - 1);
  const Eigenpair top = top_eigenpair(a);
  const LogDet ld = log_det_psd(r);

  WiensLosses out;
  out.lambda_u = lambda_u;
  out.lambda = top.value;
  out.eigenvector = top.vector;
  const double i_value = (1.0 - nu) * r_inv.trace() + nu * lambda_u;
  // R^{-1/2} S R^{-1/2} - R is PSD (S >= R^2). Its top eigenvalue is only
  // known to the roundoff of the subtraction, so values at that level are zero.
  const double scale = std::max(r.cwiseAbs().maxCoeff(), (a + r).cwiseAbs().maxCoeff());
  const double lambda_clean = top.value <= 1e-12 * scale ? 0.0 : top.value;
  const double numerator = 1.0 - nu + nu * lambda_clean;
  const double d_value = std::exp((std::log(numerator) - ld.log_det) / static_cast<double>(p));
  out.i_nu = {CriterionName::Inu, i_value, {{"nu", nu}, {"lambda_max_U", lambda_u}, {"trace_R_inv", r_inv.trace()}}};
  out.d_nu = {CriterionName::Dnu, d_value, {{"nu", nu}, {"lambda_max", top.value}, {"log_det_R", ld.log_det}}};
  return out;
}

WiensLosses wiens_losses(const RobustContext& ctx, const Vector& weights) {
  if (weights.size() != ctx.n()) throw InvalidInput("weight vector length does not match the design space");
  if ((weights.array() < 0.0).any()) throw InvalidInput("design weights must be non-negative");
  if (std::abs(weights.sum() - 1.0) > 1e-10) throw InvalidInput("design weights must sum to one");
  const Matrix& q = ctx.q_matrix();
  const Matrix dq = q.array().colwise() * weights.array();
  const Matrix d2q = dq.array().colwise() * weights.array();
  Matrix r = q.transpose() * dq;
  Matrix s = q.transpose() * d2q;
  r = 0.5 * (r + r.transpose()).eval();
  s = 0.5 * (s + s.transpose()).eval();
  return wiens_losses_from_moments(r, s, ctx.nu());
}

Vector weights_on_grid(const ModelSpec& spec, const CandidateGrid& grid, const DesignMeasure& design) {
  std::map<std::vector<double>, Index> lookup;
  auto key = [](const DesignPoint& pt) {
    std::vector<double> k(pt.x.data(), pt.x.data() + pt.x.size());
    k.insert(k.end(), pt.z.data(), pt.z.data() + pt.z.size());
    return k;
  };
  for (Index i = 0; i < grid.size(); ++i) lookup.emplace(key(grid_point(spec, grid, i)), i);
  Vector w = Vector::Zero(grid.size());
  for (std::size_t j = 0; j < design.size(); ++j) {
    const auto it = lookup.find(key(design.point(j)));
    if (it == lookup.end()) throw InvalidInput("design support point is not a grid point");
    w(it->second) += design.weight(j);
  }
  return w;
}

namespace {

struct BiasTerms {
  Matrix m11_inv;
  Vector a_psi;  // M11^{-1} M12 psi
  Vector a_phi;  // M11^{-1} M13 phi
};

BiasTerms bias_terms(const InformationMatrix& info, const BiasSpec& bias) {
  bias.validate(info.m(), info.q());
  BiasTerms t;
  t.m11_inv = spd_inverse(info.m11(), "M11");
  t.a_psi = info.m() > 0 ? Vector(t.m11_inv * (info.m12() * bias.psi)) : Vector::Zero(info.p());
  t.a_phi = info.q() > 0 ? Vector(t.m11_inv * (info.m13() * bias.phi)) : Vector::Zero(info.p());
  return t;
}

}  // namespace

CriterionValue trace_r(const InformationMatrix& info, const BiasSpec& bias, CrossTerm cross) {
  const BiasTerms t = bias_terms(info, bias);
  const double c2 = bias.n_over_sigma() * bias.n_over_sigma();
  const double s2 = t.a_psi.squaredNorm();
  const double s3 = t.a_phi.squaredNorm();
  const double s4 = t.a_phi.dot(t.a_psi);
  const double coefficient = cross == CrossTerm::derivation ? 2.0 : 1.0;
  const double base = t.m11_inv.trace();
  return {CriterionName::traceR,
          base + c2 * (s2 + s3 + coefficient * s4),
          {{"trace_M11_inv", base}, {"trS2", s2}, {"trS3", s3}, {"trS4", s4}, {"cross_coefficient", coefficient}}};
}

namespace {

CriterionValue det_r_with(const InformationMatrix& info, const BiasSpec& bias, bool confounder) {
  const BiasTerms t = bias_terms(info, bias);
  const Vector& coef = confounder ? bias.phi : bias.psi;
  const Index width = confounder ? info.q() : info.m();
  double penalty = 0.0;
  if (width > 0) {
    const Vector b = confounder ? Vector(info.m13() * coef) : Vector(info.m12() * coef);
    penalty = b.dot(t.m11_inv * b);
  }
  const LogDet ld = log_det_psd(t.m11_inv);
  const double c2 = bias.n_over_sigma() * bias.n_over_sigma();
  return {confounder ? CriterionName::detR_conf : CriterionName::detR_bias,
          ld.det * (1.0 + c2 * penalty),
          {{"penalty", penalty}, {"det_M11_inv", ld.det}, {"constraint_value", c2 * penalty}}};
}

}  // namespace

CriterionValue det_r_bias(const InformationMatrix& info, const BiasSpec& bias) {
  return det_r_with(info, bias, false);
}

CriterionValue det_r_confounder(const InformationMatrix& info, const BiasSpec& bias) {
  return det_r_with(info, bias, true);
}

MontepiedraVerdict montepiedra_check(const ModelSpec& spec, const DesignMeasure& design,
                                     const BiasSpec& bias, double budget, double lambda_star,
                                     const CandidateGrid& grid, double tol) {
  if (!(lambda_star >= 0.0)) throw InvalidInput("lambda* must be non-negative");
  if (grid.size() == 0) throw InvalidInput("montepiedra_check: empty grid");
  bias.validate(spec.m(), spec.q());
  const InformationMatrix info = information_matrix(spec, design);
  const Matrix m11_inv = spd_inverse(info.m11(), "M11");
  Vector f_bar = Vector::Zero(spec.p());
  for (std::size_t i = 0; i < design.size(); ++i) f_bar += design.weight(i) * spec.f()(design.point(i).x);
  const Vector pull = m11_inv * f_bar;
  const double rhs = static_cast<double>(spec.p()) - lambda_star * budget;

  MontepiedraVerdict verdict{true, -1, {}, -std::numeric_limits<double>::infinity()};
  for (Index i = 0; i < grid.size(); ++i) {
    const Vector x = grid.x(i);
    const Vector f = spec.f()(x);
    const double d1 = f.dot(m11_inv * f);
    const double phi_fn = f.dot(pull);
    const double r = spec.m() > 0 ? bias.n_over_sigma() * bias.psi.dot((*spec.h())(x)) : 0.0;
    const double d2 = phi_fn * phi_fn - 2.0 * phi_fn * r;
    const double excess = d1 + lambda_star * d2 - rhs;
    if (excess > verdict.max_excess) {
      verdict.max_excess = excess;
      verdict.worst_index = i;
    }
  }
  verdict.worst_point = grid_point(spec, grid, verdict.worst_index);
  verdict.holds = verdict.max_excess <= tol;
  return verdict;
}

namespace {

Matrix f_rows(const ModelSpec& spec, const std::vector<Vector>& points) {
  Matrix f(static_cast<Index>(points.size()), spec.p());
  for (std::size_t i = 0; i < points.size(); ++i) f.row(static_cast<Index>(i)) = spec.f()(points[i]).transpose();
  return f;
}

double confounder_quadratic(const ModelSpec& spec, const Matrix& f, const Matrix& m11_inv,
                            const std::vector<Vector>& assignment, const Vector& phi) {
  if (assignment.size() != static_cast<std::size_t>(f.rows())) {
    throw InvalidInput("confounder assignment length does not match the data points");
  }
  if (phi.size() != spec.q()) throw InvalidInput("phi length does not match q");
  Vector g_phi(f.rows());
  for (Index i = 0; i < f.rows(); ++i) g_phi(i) = (*spec.g())(assignment[static_cast<std::size_t>(i)]).dot(phi);
  const Vector u = m11_inv * (f.transpose() * g_phi);
  return u.squaredNorm();
}

Matrix uniform_m11_inverse(const Matrix& f) {
  const Matrix m11 = f.transpose() * f / static_cast<double>(f.rows());
  return spd_inverse(0.5 * (m11 + m11.transpose()), "M11");
}

void require_confounders(const ModelSpec& spec, const std::vector<Vector>& points) {
  if (spec.q() == 0) throw InvalidInput("model has no confounder basis");
  if (points.empty()) throw InvalidInput("no data points");
}

}  // namespace

double confounder_loss(const ModelSpec& spec, const std::vector<Vector>& data_points,
                       const std::vector<Vector>& assignment, const BiasSpec& bias) {
  require_confounders(spec, data_points);
  bias.validate(spec.m(), spec.q());
  const Matrix f = f_rows(spec, data_points);
  return confounder_quadratic(spec, f, uniform_m11_inverse(f), assignment, bias.phi);
}

double confounder_expected_worst(const ModelSpec& spec, const std::vector<Vector>& data_points,
                                 const std::vector<AssignmentScenario>& scenarios,
                                 const std::vector<Vector>& phi_candidates) {
  require_confounders(spec, data_points);
  if (scenarios.empty() || phi_candidates.empty()) throw InvalidInput("empty scenario or phi list");
  double mass = 0.0;
  for (const auto& s : scenarios) {
    if (!(s.probability >= 0.0)) throw InvalidInput("scenario probabilities must be non-negative");
    mass += s.probability;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw InvalidInput("scenario probabilities must sum to one");
  const Matrix f = f_rows(spec, data_points);
  const Matrix m11_inv = uniform_m11_inverse(f);
  double expected = 0.0;
  for (const auto& s : scenarios) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vector& phi : phi_candidates) worst = std::max(worst, confounder_quadratic(spec, f, m11_inv, s.z, phi));
    expected += s.probability * worst;
  }
  return expected;
}

ConfounderMinimax confounder_minimax(const ModelSpec& spec, const std::vector<Vector>& data_points,
                                     const std::vector<std::vector<AssignmentScenario>>& distributions,
                                     const std::vector<Vector>& phi_candidates) {
  if (distributions.empty()) throw InvalidInput("no candidate randomisation distributions");
  ConfounderMinimax out{std::numeric_limits<double>::infinity(), 0, {}};
  for (std::size_t k = 0; k < distributions.size(); ++k) {
    const double v = confounder_expected_worst(spec, data_points, distributions[k], phi_candidates);
    out.per_distribution.push_back(v);
    if (v < out.value) {
      out.value = v;
      out.best_distribution = k;
    }
  }
  return out;
}

Vector bias_identifiability(const ModelSpec& spec, const CandidateGrid& grid, const Vector& psi) {
  if (spec.m() == 0) return Vector::Zero(spec.p());
  if (psi.size() != spec.m()) throw InvalidInput("psi length does not match m");
  Vector total = Vector::Zero(spec.p());
  for (Index i = 0; i < grid.size(); ++i) {
    const Vector x = grid.x(i);
    total += spec.f()(x) * (*spec.h())(x).dot(psi);
  }
  return total;
}

}  // namespace subsel
