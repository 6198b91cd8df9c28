#pragma once

// Test-only reference computations. Deliberately naive: explicit loops,
// dense LU inverses and determinants, no use of the library's factorizations.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Mat sum_outer(const std::vector<Vec>& rows, const std::vector<double>& weights) {
  const Eigen::Index k = rows.front().size();
  Mat m = Mat::Zero(k, k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) m(a, b) += weights[i] * rows[i](a) * rows[i](b);
    }
  }
  return m;
}

inline Mat inverse(const Mat& a) { return a.fullPivLu().inverse(); }
inline double det(const Mat& a) { return a.fullPivLu().determinant(); }

/// R = M11^{-1} + c^2 M11^{-1} [M12 M13][psi; phi][psi' phi'][M21; M31] M11^{-1}.
inline Mat direct_r(const Mat& full, Eigen::Index p, Eigen::Index m, Eigen::Index q, const Vec& psi,
                    const Vec& phi, double n_over_sigma) {
  const Mat m11_inv = inverse(full.topLeftCorner(p, p));
  Mat b(p, m + q);
  b << full.block(0, p, p, m), full.block(0, p + m, p, q);
  Vec coef(m + q);
  coef << psi, phi;
  const Mat outer = coef * coef.transpose();
  return m11_inv + n_over_sigma * n_over_sigma * m11_inv * b * outer * b.transpose() * m11_inv;
}

/// Wiens ingredients from weights on explicit rows, by definition.
struct Wiens {
  double i_nu, d_nu, lambda;
  Mat t;  // full T matrix, n x n
};

inline Wiens wiens(const Mat& f, const Vec& xi, double nu) {
  const Eigen::HouseholderQR<Mat> qr(f);
  const Mat q = qr.householderQ() * Mat::Identity(f.rows(), f.cols());
  const Eigen::Index p = f.cols();
  const Mat d = xi.asDiagonal();
  const Mat r = q.transpose() * d * q;
  const Mat r_inv = inverse(r);
  const Mat u = r_inv * q.transpose() * d * d * q * r_inv;
  const Eigen::SelfAdjointEigenSolver<Mat> er(r);
  const Mat r_half = er.eigenvectors() * er.eigenvalues().cwiseSqrt().asDiagonal() * er.eigenvectors().transpose();
  const Mat r_mhalf = inverse(r_half);
  Mat a = r_half * (u - Mat::Identity(p, p)) * r_half;
  a = 0.5 * (a + a.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat> ea(a);
  const double lambda = ea.eigenvalues()(p - 1);
  const Vec z = ea.eigenvectors().col(p - 1);
  const Eigen::SelfAdjointEigenSolver<Mat> eu(0.5 * (u + u.transpose()));
  Wiens w;
  w.lambda = lambda;
  w.i_nu = (1 - nu) * r_inv.trace() + nu * eu.eigenvalues()(p - 1);
  w.d_nu = std::pow((1 - nu + nu * std::max(lambda, 0.0)) / det(r), 1.0 / static_cast<double>(p));
  const Vec v = r_half * z;
  const Vec wv = r_mhalf * z;
  const Mat j = lambda * (r_inv + wv * wv.transpose()) + (wv * v.transpose() + v * wv.transpose());
  const Mat k = 2.0 * wv * wv.transpose();
  w.t = (1 - nu) * q * r_inv * q.transpose() + nu * (q * j * q.transpose() - d * q * k * q.transpose());
  return w;
}

}  // namespace oracle
