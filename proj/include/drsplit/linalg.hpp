#pragma once

#include "drsplit/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

namespace drs {

/// Largest singular value of `l` by power iteration on L^T L.
///
/// Stops once the eigen-residual ||L^T L v - theta v|| falls below
/// rel_tol * theta, which bounds the relative error of theta by rel_tol.
inline double operator_norm(const Matrix& l, double rel_tol = 1e-12, int max_iter = 1'000'000) {
  detail::require_domain(l.size() > 0 && l.cwiseAbs().maxCoeff() > 0.0,
                         "operator_norm: L must be non-zero");
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(l.cols());
  for (Index i = 0; i < v.size(); ++i) {
    v[i] = nd(rng);
  }
  v.normalize();

  double theta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = l.transpose() * (l * v);
    theta = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) {
      // v fell into the kernel; restart from a fresh direction.
      for (Index i = 0; i < v.size(); ++i) {
        v[i] = nd(rng);
      }
      v.normalize();
      continue;
    }
    if ((w - theta * v).norm() <= rel_tol * theta) {
      break;
    }
    v = w / wn;
  }
  return std::sqrt(std::max(theta, 0.0));
}

struct EigenExtremes {
  double min;
  double max;
};

/// Extreme eigenvalues of a symmetric matrix.
inline EigenExtremes symmetric_eigen_extremes(const Matrix& m) {
  detail::require_dims(m.rows() == m.cols() && m.rows() > 0, "expected a non-empty square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

inline bool is_symmetric(const Matrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) {
    return false;
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline bool is_skew(const Matrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) {
    return false;
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m + m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Spectral norm of a 2x2 matrix from the largest eigenvalue of T T^T.
inline double spectral_norm_2x2(const Eigen::Matrix2d& t) {
  const Eigen::Matrix2d g = t * t.transpose();
  const double tr = g(0, 0) + g(1, 1);
  const double disc = std::hypot(g(0, 0) - g(1, 1), 2.0 * g(0, 1));
  return std::sqrt(0.5 * (tr + disc));
}

}  // namespace drs
