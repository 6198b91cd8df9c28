#include "subsel/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "subsel/error.hpp"

namespace subsel {

SymmetricEigen symmetric_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw SingularMatrix("symmetric eigensolver failed to converge",
                         std::numeric_limits<double>::quiet_NaN());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix spd_inverse(const Matrix& a, std::string_view what, double condition_limit) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidInput(std::string(what) + ": expected a non-empty square matrix");
  }
  const Vector values = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
  const double lo = values(0);
  const double hi = values(values.size() - 1);
  if (!(lo > 0.0) || hi / lo > condition_limit) {
    throw SingularMatrix(std::string(what) + " is singular or ill-conditioned (smallest eigenvalue " +
                             std::to_string(lo) + ", largest " + std::to_string(hi) + ")",
                         lo);
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrix(std::string(what) + ": Cholesky factorisation failed", lo);
  }
  Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
  return 0.5 * (inv + inv.transpose());
}

Index numeric_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const Vector values = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
  const double scale = values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  Index rank = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) > rel_tol * scale) ++rank;
  }
  return rank;
}

LogDet log_det_psd(const Matrix& a) {
  const Vector values = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
  const double hi = values.size() ? values(values.size() - 1) : 0.0;
  if (values.size() == 0 || !(hi > 0.0) || values(0) <= 1e-14 * hi) {
    return {-std::numeric_limits<double>::infinity(), 0.0, true};
  }
  double log_det = 0.0;
  for (Index i = 0; i < values.size(); ++i) log_det += std::log(values(i));
  return {log_det, std::exp(log_det), false};
}

SymmetricRoots symmetric_roots(const Matrix& r, double floor) {
  const SymmetricEigen eig = symmetric_eigen(r);
  const double lo = eig.values(0);
  if (!(lo >= floor)) {
    throw SingularMatrix("matrix square root: eigenvalue " + std::to_string(lo) +
                             " below floor",
                         lo);
  }
  const Vector s = eig.values.cwiseSqrt();
  const Matrix& v = eig.vectors;
  SymmetricRoots out;
  out.sqrt = v * s.asDiagonal() * v.transpose();
  out.inv_sqrt = v * s.cwiseInverse().asDiagonal() * v.transpose();
  out.inverse = v * eig.values.cwiseInverse().asDiagonal() * v.transpose();
  out.smallest_eigenvalue = lo;
  return out;
}

namespace {

double first_nonzero(const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) return v(i);
  }
  return 0.0;
}

}  // namespace

Eigenpair top_eigenpair(const Matrix& a) {
  const SymmetricEigen eig = symmetric_eigen(a);
  const Index n = eig.values.size();
  const double top = eig.values(n - 1);
  Index best = n - 1;
  double best_lead = std::abs(first_nonzero(eig.vectors.col(best)));
  for (Index i = n - 2; i >= 0 && top - eig.values(i) <= 1e-10; --i) {
    const double lead = std::abs(first_nonzero(eig.vectors.col(i)));
    if (lead > best_lead) {
      best = i;
      best_lead = lead;
    }
  }
  Vector vec = eig.vectors.col(best);
  if (first_nonzero(vec) < 0.0) vec = -vec;
  return {top, vec};
}

double asymmetry(const Matrix& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace subsel
