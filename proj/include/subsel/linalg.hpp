#pragma once

// Small dense symmetric-matrix kernels shared by the criteria and the
// selection algorithms.

#include <string_view>

#include "subsel/types.hpp"

namespace subsel {

/// Largest admissible condition number before an inversion is refused.
inline constexpr double kConditionLimit = 1e12;
/// Smallest admissible eigenvalue when forming symmetric square roots.
inline constexpr double kEigenFloor = 1e-12;

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns match values
};

SymmetricEigen symmetric_eigen(const Matrix& a);

/// Inverse of a symmetric positive definite matrix.
/// Throws SingularMatrix when the smallest eigenvalue is not positive or the
/// condition number exceeds `condition_limit`. No pseudo-inverse fallback.
Matrix spd_inverse(const Matrix& a, std::string_view what,
                   double condition_limit = kConditionLimit);

/// Rank at tolerance rel_tol * max|eigenvalue|.
Index numeric_rank(const Matrix& a, double rel_tol = 1e-9);

struct LogDet {
  double log_det;  // -inf when singular
  double det;
  bool singular;
};

/// Log-determinant of a symmetric PSD matrix; singular when an eigenvalue is
/// at or below 1e-14 times the largest.
LogDet log_det_psd(const Matrix& a);

struct SymmetricRoots {
  Matrix sqrt;
  Matrix inv_sqrt;
  Matrix inverse;
  double smallest_eigenvalue;
};

/// R^{1/2}, R^{-1/2}, R^{-1} by eigendecomposition. Eigenvalues below `floor`
/// raise SingularMatrix (they are never clipped).
SymmetricRoots symmetric_roots(const Matrix& r, double floor = kEigenFloor);

struct Eigenpair {
  double value;
  Vector vector;
};

/// Largest eigenvalue and a unit eigenvector. If the top eigenvalue has
/// multiplicity > 1 (within 1e-10) the candidate with the largest absolute
/// first nonzero component is returned. The sign is fixed so that the first
/// nonzero component is positive.
Eigenpair top_eigenpair(const Matrix& a);

/// Max |a_ij - a_ji|.
double asymmetry(const Matrix& a);

}  // namespace subsel
