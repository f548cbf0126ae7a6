#pragma once

// Random test-problem generators with fixed seeds.

#include "drsplit/core.hpp"
#include "drsplit/linalg.hpp"
#include "drsplit/quadform.hpp"

#include <cmath>
#include <random>

namespace drs::random {

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = nd(rng);
    }
  }
  return m;
}

inline double log_uniform(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline double uniform(double lo, double hi, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random skew matrix with spectral norm beta.
inline Matrix skew(Index n, double beta, std::mt19937_64& rng) {
  const Matrix g = gaussian(n, n, rng);
  const Matrix s = g - g.transpose();
  return beta * s / operator_norm(s);
}

/// Symmetric positive semidefinite matrix with spectral norm `scale`.
inline Matrix psd(Index n, double scale, std::mt19937_64& rng) {
  const Matrix g = gaussian(n, n, rng);
  const Matrix s = g * g.transpose();
  return scale * s / operator_norm(s);
}

/// Symmetric matrix with eigenvalues drawn from [lo, hi] (both endpoints attained).
inline Matrix symmetric_with_spectrum(Index n, double lo, double hi, std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  const Matrix q = qr.householderQ();
  Vector ev(n);
  for (Index i = 0; i < n; ++i) {
    ev[i] = uniform(lo, hi, rng);
  }
  ev[0] = lo;
  if (n > 1) {
    ev[n - 1] = hi;
  }
  return q * ev.asDiagonal() * q.transpose();
}

/// Monotone, non-symmetric linear map: skew part plus a small PSD part, rescaled to
/// spectral norm beta (so it is monotone and exactly beta-Lipschitz).
inline Matrix monotone_lipschitz(Index n, double beta, std::mt19937_64& rng,
                                 double psd_weight = 0.1) {
  const Matrix m = skew(n, 1.0, rng) + psd(n, psd_weight, rng);
  return beta * m / operator_norm(m);
}

}  // namespace drs::random
