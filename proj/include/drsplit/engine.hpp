#pragma once

// Douglas-Rachford iteration for 0 in A x + B x.
//
//   B_after_A:  x+ = 1/2 (x + R_{gB} R_{gA} x),  shadow J_{gA} x
//   A_after_B:  x+ = 1/2 (x + R_{gA} R_{gB} x),  shadow J_{gB} x
//
// The engine never assumes -R_B R_A is averaged. A rate guarantee is attached
// to a run only when the declared property tags of the inputs support one.

#include "drsplit/core.hpp"
#include "drsplit/operators.hpp"
#include "drsplit/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace drs {

enum class Order {
  B_after_A,  // T = 1/2 (Id + R_B R_A)
  A_after_B,  // T~ = 1/2 (Id + R_A R_B)
};

struct DRConfig {
  Order order = Order::B_after_A;
  double gamma = 1.0;
  int max_iter = 100000;
  double tol = 1e-10;
  /// Starting point; an empty vector means the origin.
  Vector x0;
  /// Store the iterate and shadow sequences (step norms are always kept).
  bool keep_history = true;

  void check() const {
    detail::require_domain(gamma > 0.0 && std::isfinite(gamma), "DRConfig: gamma must be > 0");
    detail::require_domain(tol > 0.0, "DRConfig: tol must be > 0");
    detail::require_domain(max_iter >= 1, "DRConfig: max_iter must be >= 1");
  }
};

struct IterationTrace {
  std::vector<Vector> iterates;
  std::vector<Vector> shadow;
  /// ||x_{n+1} - x_n|| for each step taken.
  std::vector<double> step_norms;
  /// Inclusion residual ||gA z_n + (w_n - J_{gB} w_n)|| at the shadow point of x_n.
  std::vector<double> shadow_residuals;
  bool converged = false;
  int iterations_used = 0;
  /// Contraction factor the declared properties guarantee for this run, if any.
  std::optional<RateReport> guarantee;
};

struct RunResult {
  IterationTrace trace;
  Vector fixed_point;
  Vector shadow_point;
};

struct RateFit {
  double r_emp;
  std::pair<int, int> window;
  double residual;
};

namespace detail {

/// Strongest constants implied directly by a claim list.
struct ClaimSummary {
  double mu = 0.0;                                          // strong monotonicity
  bool monotone = false;
  double lipschitz = std::numeric_limits<double>::infinity();
  double coco_beta = std::numeric_limits<double>::infinity();  // (1/beta)-cocoercive
};

inline ClaimSummary summarize(const std::vector<PropertyTag>& claims) {
  ClaimSummary s;
  for (const auto& tag : claims) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Monotone>) {
            s.monotone = true;
          } else if constexpr (std::is_same_v<T, StronglyMonotone>) {
            s.monotone = true;
            s.mu = std::max(s.mu, t.mu);
          } else if constexpr (std::is_same_v<T, Lipschitz>) {
            s.lipschitz = std::min(s.lipschitz, t.beta);
          } else if constexpr (std::is_same_v<T, Cocoercive>) {
            s.monotone = true;
            s.coco_beta = std::min(s.coco_beta, t.beta());
            s.lipschitz = std::min(s.lipschitz, t.beta());
          }
        },
        tag);
  }
  return s;
}

inline void consider(std::optional<RateReport>& best, RateReport candidate) {
  if (!best || candidate.value < best->value) {
    best = std::move(candidate);
  }
}

/// Classical cases with `first` inside R_first and `second` applied last.
inline void classical_cases(std::optional<RateReport>& best, const ClaimSummary& first,
                            const ClaimSummary& second, double gamma) {
  const bool first_coco = std::isfinite(first.coco_beta);
  if (first_coco && second.mu > 0.0) {
    consider(best, rate_case_a(std::min(second.mu, first.coco_beta), first.coco_beta, gamma));
  }
  if (first_coco && first.mu > 0.0) {
    consider(best, rate_case_b(std::min(first.mu, first.coco_beta), first.coco_beta, gamma));
  }
  if (std::isfinite(first.lipschitz) && first.mu > 0.0) {
    consider(best, rate_case_c(std::min(first.mu, first.lipschitz), first.lipschitz, gamma));
  }
}

}  // namespace detail

/// Best contraction factor implied by the declared properties for the given order.
inline std::optional<RateReport> applicable_guarantee(const OperatorSpec& a, const OperatorSpec& b,
                                                      Order order, double gamma = 1.0) {
  const auto sa = detail::summarize(a.claims());
  const auto sb = detail::summarize(b.claims());
  std::optional<RateReport> best;
  if (order == Order::B_after_A) {
    detail::classical_cases(best, sa, sb, gamma);
  } else {
    detail::classical_cases(best, sb, sa, gamma);
  }
  const bool lipschitz_monotone_a =
      sa.monotone && std::isfinite(sa.lipschitz) && sa.lipschitz > 0.0 && a.is_single_valued();
  const bool order_ok = order == Order::B_after_A || a.is_linear();
  if (lipschitz_monotone_a && sb.mu > 0.0 && order_ok) {
    detail::consider(best, rate_lip_strong(sa.lipschitz, sb.mu, gamma));
    if (a.is_skew() && a.is_linear()) {
      detail::consider(best, rate_skew_strong(sa.lipschitz, sb.mu, gamma));
    }
  }
  return best;
}

namespace detail {

struct StepParts {
  Vector next;
  Vector shadow;
  double inclusion_residual;
};

/// One DR step with `inner` applied first and `outer` second.
inline StepParts dr_parts(const OperatorSpec& inner, const OperatorSpec& outer, const Vector& x,
                          double gamma) {
  const Vector z = inner.resolvent(x, gamma);
  const Vector w = 2.0 * z - x;
  const Vector u = outer.resolvent(w, gamma);
  // gamma*inner(z) and the selection (w - u) of gamma*outer(u).
  const Vector inner_val = inner.is_single_valued() ? Vector(gamma * inner.apply(z)) : Vector(x - z);
  return {x + u - z, z, (inner_val + (w - u)).norm()};
}

}  // namespace detail

inline Vector dr_step(const OperatorSpec& a, const OperatorSpec& b, const Vector& x,
                      const DRConfig& cfg) {
  cfg.check();
  detail::require_dims(a.dim() == b.dim() && x.size() == a.dim(), "dr_step: dimension mismatch");
  if (cfg.order == Order::B_after_A) {
    const Vector ra = a.reflected_resolvent(x, cfg.gamma);
    return 0.5 * (x + b.reflected_resolvent(ra, cfg.gamma));
  }
  const Vector rb = b.reflected_resolvent(x, cfg.gamma);
  return 0.5 * (x + a.reflected_resolvent(rb, cfg.gamma));
}

/// Iterates until ||x_{n+1} - x_n|| <= tol * max(1, ||x_n||) or max_iter steps.
///
/// The returned fixed point is the last iterate, the shadow point its image under
/// J_{gA} (B_after_A) or J_{gB} (A_after_B). Non-convergence is reported through
/// trace.converged, not by throwing.
inline RunResult run(const OperatorSpec& a, const OperatorSpec& b, const DRConfig& cfg) {
  cfg.check();
  detail::require_dims(a.dim() == b.dim(), "run: operators act on different spaces");
  Vector x = cfg.x0.size() == 0 ? Vector(Vector::Zero(a.dim())) : cfg.x0;
  detail::require_dims(x.size() == a.dim(), "run: x0 has the wrong dimension");

  const OperatorSpec& inner = cfg.order == Order::B_after_A ? a : b;
  const OperatorSpec& outer = cfg.order == Order::B_after_A ? b : a;

  RunResult res;
  IterationTrace& tr = res.trace;
  tr.guarantee = applicable_guarantee(a, b, cfg.order, cfg.gamma);
  if (cfg.keep_history) {
    tr.iterates.push_back(x);
  }

  detail::StepParts parts = detail::dr_parts(inner, outer, x, cfg.gamma);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (cfg.keep_history) {
      tr.shadow.push_back(parts.shadow);
    }
    tr.shadow_residuals.push_back(parts.inclusion_residual);
    const double step = (parts.next - x).norm();
    const double scale = std::max(1.0, x.norm());
    x = std::move(parts.next);
    tr.step_norms.push_back(step);
    tr.iterations_used = it + 1;
    if (cfg.keep_history) {
      tr.iterates.push_back(x);
    }
    parts = detail::dr_parts(inner, outer, x, cfg.gamma);
    if (step <= cfg.tol * scale) {
      tr.converged = true;
      break;
    }
  }
  if (cfg.keep_history) {
    tr.shadow.push_back(parts.shadow);
  }
  res.shadow_point = parts.shadow;
  res.fixed_point = std::move(x);
  return res;
}

/// Fits log(step_norm_n) ~ n log r over the last `tail_fraction` of usable steps.
///
/// Steps below 1e2 * eps * max(||x_bar||, 1) sit at the rounding floor and are dropped.
inline RateFit estimate_rate(const IterationTrace& trace, double tail_fraction = 0.5,
                             double fixed_point_norm = 0.0) {
  detail::require_domain(tail_fraction > 0.0 && tail_fraction <= 1.0,
                         "estimate_rate: tail_fraction must be in (0, 1]");
  detail::require_domain(trace.step_norms.size() + 1 >= 10,
                         "estimate_rate: trace needs at least 10 iterates");
  const double floor =
      1e2 * std::numeric_limits<double>::epsilon() * std::max(fixed_point_norm, 1.0);

  // Usable prefix: steps above the floor, stopping at the first one that hits it.
  int usable = 0;
  const int total = static_cast<int>(trace.step_norms.size());
  while (usable < total && trace.step_norms[usable] > floor) {
    ++usable;
  }
  const int count = std::max(3, static_cast<int>(std::ceil(tail_fraction * usable)));
  detail::require_domain(usable >= 3, "estimate_rate: fewer than 3 usable points");
  const int begin = std::max(0, usable - count);
  const int n = usable - begin;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = begin; i < usable; ++i) {
    const double xi = i;
    const double yi = std::log(trace.step_norms[i]);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double icpt = (sy - slope * sx) / n;
  double sse = 0.0;
  for (int i = begin; i < usable; ++i) {
    const double e = std::log(trace.step_norms[i]) - (icpt + slope * i);
    sse += e * e;
  }
  return {std::exp(slope), {begin, usable}, std::sqrt(sse / n)};
}

}  // namespace drs
