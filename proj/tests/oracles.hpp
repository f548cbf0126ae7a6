#pragma once

// Reference computations that do not share code paths with the library.

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest singular value from a full SVD.
inline double svd_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// sqrt of the largest eigenvalue of M^T M from a dense symmetric eigensolver.
inline double eig_norm(const Matrix& m) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

inline double quintic(double g) {
  return 4 * std::pow(g, 5) + 5 * std::pow(g, 4) + 12 * std::pow(g, 3) + 2 * g * g - 3;
}

/// The quintic is increasing on (0, 1) with a sign change; plain bisection.
inline double quintic_root() {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (quintic(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Skew rate written out directly from its closed form, at (g beta, g mu).
inline double skew_rate(double beta, double mu, double g = 1.0) {
  const double b = g * beta, m = g * mu;
  const double lam = 1.0 - 2.0 / (1.0 + b * b);
  return (std::sqrt(2 * m * m + 2 * m + 1 + 2 * lam * m * (1 + m)) + 1.0) / (2.0 * (1.0 + m));
}

/// Dense scan of a 1-D function on a log grid followed by local refinement.
inline double argmin_scan(const std::function<double(double)>& h, double lo, double hi) {
  const int n = 20001;
  double best = lo, best_v = h(lo);
  for (int i = 0; i < n; ++i) {
    const double x = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    const double v = h(x);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
  }
  double step = best * 1e-3;
  for (int k = 0; k < 60; ++k) {
    for (double c : {best - step, best + step}) {
      if (c > 0 && h(c) < best_v) {
        best_v = h(c);
        best = c;
      }
    }
    step *= 0.7;
  }
  return best;
}

/// Primal solution of min 1/2 x'Px + q'x + 1/2 (Lx)'S(Lx) + t'Lx.
inline Vector normal_equations(const Matrix& p, const Vector& q, const Matrix& s, const Vector& t,
                               const Matrix& l) {
  const Matrix h = p + l.transpose() * s * l;
  return h.fullPivLu().solve(-q - l.transpose() * t);
}

/// Explicit resolvent (Id + gA)^{-1} x of a linear map via a dense inverse.
inline Vector linear_resolvent(const Matrix& a, const Vector& x, double gamma = 1.0) {
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  return (id + gamma * a).inverse() * x;
}

/// DR matrix 1/2 (Id + R_B R_A) for linear A, B via dense inverses.
inline Matrix dr_matrix(const Matrix& a, const Matrix& b, double gamma = 1.0) {
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix ra = 2.0 * (id + gamma * a).inverse() - id;
  const Matrix rb = 2.0 * (id + gamma * b).inverse() - id;
  return 0.5 * (id + rb * ra);
}

}  // namespace oracle
