#pragma once

// Primal-dual Douglas-Rachford for min_x f(x) + g(Lx) with quadratic f and g.
//
//   f(x) = 1/2 x^T P x + q^T x,  P symmetric positive definite (sigma = lambda_min(P))
//   g(y) = 1/2 y^T S y + t^T y,  S symmetric positive semidefinite (beta_g = lambda_max(S))
//
// The product-space inclusion 0 in A(x, y) + B(x, y) uses the skew operator
// A(x, y) = (L^T y, -L x) and B = df x dg*, which is min{sigma, 1/beta_g}-strongly
// monotone. Its zero is the primal-dual pair (x*, y*) with y* = grad g(L x*).

#include "drsplit/core.hpp"
#include "drsplit/engine.hpp"
#include "drsplit/linalg.hpp"
#include "drsplit/operators.hpp"
#include "drsplit/rates.hpp"

#include <limits>
#include <utility>

namespace drs {

class CompositeProblem {
public:
  CompositeProblem(Matrix P, Vector q, Matrix S, Vector t, Matrix L)
      : P_(std::move(P)), q_(std::move(q)), S_(std::move(S)), t_(std::move(t)), L_(std::move(L)) {
    using detail::require_dims;
    using detail::require_domain;
    require_dims(P_.rows() == P_.cols() && P_.rows() > 0, "P must be square and non-empty");
    require_dims(S_.rows() == S_.cols() && S_.rows() > 0, "S must be square and non-empty");
    require_dims(q_.size() == P_.rows(), "q must match P");
    require_dims(t_.size() == S_.rows(), "t must match S");
    require_dims(L_.cols() == P_.rows() && L_.rows() == S_.rows(),
                 "L must map R^dim(P) into R^dim(S)");
    require_domain(P_.allFinite() && q_.allFinite() && S_.allFinite() && t_.allFinite() &&
                       L_.allFinite(),
                   "problem data must be finite");
    require_domain(is_symmetric(P_), "P must be symmetric");
    require_domain(is_symmetric(S_), "S must be symmetric");
    require_domain(L_.cwiseAbs().maxCoeff() > 0.0, "L must be non-zero");

    const auto pe = symmetric_eigen_extremes(P_);
    const auto se = symmetric_eigen_extremes(S_);
    sigma_ = pe.min;
    beta_g_ = se.max;
    require_domain(sigma_ > 0.0, "P must be positive definite (f strongly convex)");
    const double s_scale = std::max(1.0, S_.cwiseAbs().maxCoeff());
    require_domain(se.min >= -1e-12 * s_scale, "S must be positive semidefinite (g convex)");
    require_domain(beta_g_ > 0.0, "S must be non-zero (grad g beta-Lipschitz with beta > 0)");
    norm_L_ = operator_norm(L_);
  }

  const Matrix& P() const { return P_; }
  const Vector& q() const { return q_; }
  const Matrix& S() const { return S_; }
  const Vector& t() const { return t_; }
  const Matrix& L() const { return L_; }

  Index n() const { return P_.rows(); }
  Index m() const { return S_.rows(); }

  double sigma() const { return sigma_; }
  double beta_g() const { return beta_g_; }
  double norm_L() const { return norm_L_; }
  /// Strong monotonicity modulus of B.
  double mu() const { return std::min(sigma_, 1.0 / beta_g_); }

  double f(const Vector& x) const { return 0.5 * x.dot(P_ * x) + q_.dot(x); }
  double g(const Vector& y) const { return 0.5 * y.dot(S_ * y) + t_.dot(y); }

  /// f*(u) = 1/2 (u - q)^T P^{-1} (u - q)
  double f_conj(const Vector& u) const {
    const Vector d = u - q_;
    return 0.5 * d.dot(Eigen::LLT<Matrix>(P_).solve(d));
  }

  /// g*(v) = 1/2 (v - t)^T S^+ (v - t) on t + range(S), +inf elsewhere.
  double g_conj(const Vector& v, double range_tol = 1e-9) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S_);
    const Vector d = es.eigenvectors().transpose() * (v - t_);
    const double cut = 1e-12 * std::max(1.0, beta_g_);
    double val = 0.0;
    for (Index i = 0; i < d.size(); ++i) {
      const double ev = es.eigenvalues()[i];
      if (ev > cut) {
        val += 0.5 * d[i] * d[i] / ev;
      } else if (std::abs(d[i]) > range_tol * std::max(1.0, (v - t_).norm())) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return val;
  }

private:
  Matrix P_;
  Vector q_;
  Matrix S_;
  Vector t_;
  Matrix L_;
  double sigma_ = 0.0;
  double beta_g_ = 0.0;
  double norm_L_ = 0.0;
};

struct PDSolution {
  Vector x_star;
  Vector y_star;
  double rate_bound;
  IterationTrace trace;
  double kkt_residual;
  Vector fixed_point;
};

/// The skew operator A and the strongly monotone B of the product-space inclusion.
inline std::pair<OperatorSpec, OperatorSpec> build_inclusion(const CompositeProblem& p,
                                                             ValidationOptions opts = {}) {
  OperatorSpec a(SkewFromL{p.L()}, {Monotone{}, Lipschitz{p.norm_L()}}, opts);
  OperatorSpec df(QuadraticGradient{p.P(), p.q()}, {StronglyMonotone{p.sigma()}}, opts);
  OperatorSpec dg_conj(InverseQuadraticGradient{p.S(), p.t()},
                       {StronglyMonotone{1.0 / p.beta_g()}}, opts);
  OperatorSpec b = make_product(df, dg_conj, {StronglyMonotone{p.mu()}}, opts);
  return {std::move(a), std::move(b)};
}

/// ||P x + q + L^T y|| + ||y - (S L x + t)||
inline double kkt_residual(const CompositeProblem& p, const Vector& x, const Vector& y) {
  detail::require_dims(x.size() == p.n() && y.size() == p.m(), "kkt_residual: dimension mismatch");
  const Vector stat = p.P() * x + p.q() + p.L().transpose() * y;
  const Vector link = y - (p.S() * (p.L() * x) + p.t());
  return stat.norm() + link.norm();
}

/// f(x) + g(Lx) + f*(-L^T y) + g*(y); zero exactly at the saddle point.
inline double duality_gap(const CompositeProblem& p, const Vector& x, const Vector& y) {
  detail::require_dims(x.size() == p.n() && y.size() == p.m(), "duality_gap: dimension mismatch");
  return p.f(x) + p.g(p.L() * x) + p.f_conj(-(p.L().transpose() * y)) + p.g_conj(y);
}

inline PDSolution solve(const CompositeProblem& p, const DRConfig& cfg,
                        ValidationOptions opts = {}) {
  auto [a, b] = build_inclusion(p, opts);
  RunResult run_res = run(a, b, cfg);
  PDSolution sol;
  sol.x_star = run_res.shadow_point.head(p.n());
  sol.y_star = run_res.shadow_point.tail(p.m());
  sol.rate_bound = rate_primal_dual(p.norm_L(), p.sigma(), p.beta_g(), cfg.gamma).value;
  sol.kkt_residual = kkt_residual(p, sol.x_star, sol.y_star);
  sol.trace = std::move(run_res.trace);
  sol.fixed_point = std::move(run_res.fixed_point);
  return sol;
}

}  // namespace drs
