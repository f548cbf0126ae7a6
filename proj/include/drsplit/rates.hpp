#pragma once

// Closed-form contraction factors for Douglas-Rachford iterations.
//
// Every rate accepts a step length gamma and is evaluated at the scaled
// parameters, since gamma*A inherits the properties of A with beta and mu
// multiplied by gamma.

#include "drsplit/core.hpp"
#include "drsplit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace drs {

enum class RateCase {
  CocoStrong_a,    // A (1/beta)-cocoercive, B mu-strongly monotone
  StrongCoco_b,    // A mu-strongly monotone and (1/beta)-cocoercive
  StrongLip_c,     // A mu-strongly monotone and beta-Lipschitz
  LipStrong_main,  // A monotone beta-Lipschitz, B mu-strongly monotone
  SkewStrong,      // A linear skew beta-Lipschitz, B mu-strongly monotone
  PrimalDual,
  Composed,
};

inline std::string to_string(RateCase c) {
  switch (c) {
    case RateCase::CocoStrong_a: return "a";
    case RateCase::StrongCoco_b: return "b";
    case RateCase::StrongLip_c: return "c";
    case RateCase::LipStrong_main: return "lip";
    case RateCase::SkewStrong: return "skew";
    case RateCase::PrimalDual: return "pd";
    case RateCase::Composed: return "composed";
  }
  return "?";
}

struct RateReport {
  double value;
  RateCase rate_case;
  std::map<std::string, double> inputs;
};

struct GammaSweepResult {
  double gamma_star;
  double rate_at_star;
  std::pair<double, double> bracket;
  int evaluations;
};

namespace detail {

inline void require_positive(double v, const char* name) {
  require_domain(std::isfinite(v) && v > 0.0, std::string(name) + " must be positive and finite");
}

inline void require_ordered(double mu, double beta) {
  require_positive(mu, "mu");
  require_positive(beta, "beta");
  require_domain(beta >= mu, "rate requires beta >= mu > 0");
}

inline double checked_sqrt(double radicand, const char* where) {
  require_domain(radicand >= 0.0, std::string(where) + ": negative radicand");
  return std::sqrt(radicand);
}

/// 1/(2(1+mu)) (sqrt(2mu^2 + 2mu + 1 + 2 lam mu (1+mu)) + 1)
inline double lip_strong_family(double mu, double lam) {
  const double rad = 2.0 * mu * mu + 2.0 * mu + 1.0 + 2.0 * lam * mu * (1.0 + mu);
  return (checked_sqrt(rad, "Lipschitz/strong rate") + 1.0) / (2.0 * (1.0 + mu));
}

}  // namespace detail

/// Lipschitz factor of R_A for A mu-strongly monotone and (1/beta)-cocoercive.
inline double reflected_factor_strong_coco(double mu, double beta) {
  detail::require_ordered(mu, beta);
  return detail::checked_sqrt((1.0 - 2.0 * mu + mu * beta) / (1.0 + 2.0 * mu + mu * beta),
                              "reflected_factor_strong_coco");
}

/// Lipschitz factor of R_A for A mu-strongly monotone and beta-Lipschitz.
inline double reflected_factor_strong_lip(double mu, double beta) {
  detail::require_ordered(mu, beta);
  return detail::checked_sqrt((1.0 - 2.0 * mu + beta * beta) / (1.0 + 2.0 * mu + beta * beta),
                              "reflected_factor_strong_lip");
}

/// Lipschitz factor of R_A for A mu-strongly monotone and alpha-averaged.
inline double reflected_factor_averaged(double mu, double alpha) {
  detail::require_domain(mu > 0.0 && mu < 1.0, "reflected_factor_averaged needs 0 < mu < 1");
  detail::require_domain(alpha > 0.0 && alpha < 1.0,
                         "reflected_factor_averaged needs 0 < alpha < 1");
  const double num = alpha * (1.0 - mu);
  return std::sqrt(num / (num + 2.0 * mu));
}

inline RateReport rate_case_a(double mu, double beta, double gamma = 1.0) {
  detail::require_ordered(mu, beta);
  detail::require_positive(gamma, "gamma");
  const double m = gamma * mu;
  const double b = gamma * beta;
  return {(1.0 + m * b) / (1.0 + m + m * b), RateCase::CocoStrong_a,
          {{"mu", mu}, {"beta", beta}, {"gamma", gamma}}};
}

inline RateReport rate_case_b(double mu, double beta, double gamma = 1.0) {
  detail::require_ordered(mu, beta);
  detail::require_positive(gamma, "gamma");
  return {0.5 + 0.5 * reflected_factor_strong_coco(gamma * mu, gamma * beta),
          RateCase::StrongCoco_b,
          {{"mu", mu}, {"beta", beta}, {"gamma", gamma}}};
}

inline RateReport rate_case_c(double mu, double beta, double gamma = 1.0) {
  detail::require_ordered(mu, beta);
  detail::require_positive(gamma, "gamma");
  const double m = gamma * mu;
  const double b = gamma * beta;
  const double kappa =
      detail::checked_sqrt((1.0 - 2.0 * m + b * b) / (1.0 + 2.0 * m + b * b), "rate_case_c");
  return {0.5 + 0.5 * kappa, RateCase::StrongLip_c,
          {{"mu", mu}, {"beta", beta}, {"gamma", gamma}}};
}

/// Hypomonotonicity constant of R_A for A monotone and beta-Lipschitz; lies in (-1, 1).
inline double lambda_hypo(double beta) {
  detail::require_positive(beta, "beta");
  const double b1 = 1.0 + beta;
  return 1.0 - 1.0 / (b1 * b1) - 1.0 / (1.0 + beta * beta);
}

/// Lipschitz constant of 1/2 (Id + R M) with -R alpha-averaged and M nonexpansive
/// lam-hypomonotone.
inline double composed_contraction(double alpha, double lam) {
  detail::require_domain(alpha > 0.0 && alpha < 1.0, "composed_contraction needs alpha in (0, 1)");
  detail::require_domain(lam >= -1.0 && lam < 1.0, "composed_contraction needs lambda in [-1, 1)");
  const double a1 = 1.0 - alpha;
  return 0.5 * (std::sqrt(1.0 + a1 * a1 + 2.0 * lam * a1) + alpha);
}

inline RateReport rate_lip_strong(double beta, double mu, double gamma = 1.0) {
  detail::require_positive(beta, "beta");
  detail::require_positive(mu, "mu");
  detail::require_positive(gamma, "gamma");
  const double lam = lambda_hypo(gamma * beta);
  return {detail::lip_strong_family(gamma * mu, lam), RateCase::LipStrong_main,
          {{"beta", beta}, {"mu", mu}, {"gamma", gamma}, {"lambda", lam}}};
}

inline RateReport rate_skew_strong(double beta, double mu, double gamma = 1.0) {
  detail::require_positive(beta, "beta");
  detail::require_positive(mu, "mu");
  detail::require_positive(gamma, "gamma");
  const double b = gamma * beta;
  return {detail::lip_strong_family(gamma * mu, 1.0 - 2.0 / (1.0 + b * b)), RateCase::SkewStrong,
          {{"beta", beta}, {"mu", mu}, {"gamma", gamma}}};
}

/// DR operator 1/2 (Id + R_B R_A) for A = beta*[[0,1],[-1,0]] and B = mu Id + N_{{0} x R}.
inline Eigen::Matrix2d sharp_example_matrix(double beta, double mu) {
  detail::require_positive(beta, "beta");
  detail::require_positive(mu, "mu");
  const double b2 = beta * beta;
  Eigen::Matrix2d t;
  t << b2, beta, beta * (1.0 - mu) / (1.0 + mu), (1.0 + b2 * mu) / (1.0 + mu);
  return t / (b2 + 1.0);
}

/// Spectral norm of the sharp 2x2 example; equals rate_skew_strong(beta, mu).
inline double spectral_norm_T_sharp(double beta, double mu) {
  return spectral_norm_2x2(sharp_example_matrix(beta, mu));
}

inline RateReport rate_primal_dual(double norm_L, double sigma, double beta_g, double gamma = 1.0) {
  detail::require_positive(norm_L, "norm_L");
  detail::require_positive(sigma, "sigma");
  detail::require_positive(beta_g, "beta_g");
  const double mu = std::min(sigma, 1.0 / beta_g);
  RateReport r = rate_skew_strong(norm_L, mu, gamma);
  r.rate_case = RateCase::PrimalDual;
  r.inputs = {{"norm_L", norm_L}, {"sigma", sigma}, {"beta_g", beta_g}, {"mu", mu},
              {"gamma", gamma}};
  return r;
}

/// Step length minimizing rate_skew_strong(gamma*beta, gamma*mu).
///
/// A log-spaced scan over [1e-3, 1e3] (widened while the minimum sits on an edge)
/// brackets the minimizer, then golden-section search shrinks the bracket below tol.
inline GammaSweepResult optimal_gamma(double beta, double mu, double tol = 1e-8) {
  detail::require_positive(beta, "beta");
  detail::require_positive(mu, "mu");
  detail::require_positive(tol, "tol");

  int evals = 0;
  auto h = [&](double g) {
    ++evals;
    return rate_skew_strong(beta, mu, g).value;
  };

  double lo_exp = -3.0;
  double hi_exp = 3.0;
  constexpr int kScan = 61;
  double a = 0.0;
  double b = 0.0;
  for (int widen = 0; widen < 40; ++widen) {
    const double step = (hi_exp - lo_exp) / (kScan - 1);
    int best = 0;
    double best_val = h(std::pow(10.0, lo_exp));
    for (int i = 1; i < kScan; ++i) {
      const double val = h(std::pow(10.0, lo_exp + i * step));
      if (val < best_val) {
        best_val = val;
        best = i;
      }
    }
    if (best == 0) {
      lo_exp -= 3.0;
      continue;
    }
    if (best == kScan - 1) {
      hi_exp += 3.0;
      continue;
    }
    a = std::pow(10.0, lo_exp + (best - 1) * step);
    b = std::pow(10.0, lo_exp + (best + 1) * step);
    break;
  }
  detail::require_domain(b > a, "optimal_gamma: failed to bracket the minimizer");

  const std::pair<double, double> bracket{a, b};
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = h(c);
  double fd = h(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = h(d);
    }
  }
  const double g = 0.5 * (a + b);
  return {g, h(g), bracket, evals};
}

}  // namespace drs
