#pragma once

// Operator properties as quadratic-form inequalities on graphs.
//
// A QuadForm2 [[a11, a12], [a12, a22]] stands for the inequality
//
//   a11 ||x - y||^2 + 2 a12 <x - y, u - v> + a22 ||u - v||^2 >= 0
//
// over all pairs (x, u), (y, v) of a graph. Moving between the graph of an
// operator, its resolvent and its reflected resolvent is a linear change of
// coordinates, which acts on the form by congruence.

#include "drsplit/core.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace drs {

class QuadForm2 {
public:
  constexpr QuadForm2() = default;

  QuadForm2(double a11, double a12, double a22) : a11_(a11), a12_(a12), a22_(a22) {
    detail::require_domain(std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a22),
                           "QuadForm2 entries must be finite");
  }

  double a11() const { return a11_; }
  double a12() const { return a12_; }
  double a22() const { return a22_; }

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << a11_, a12_, a12_, a22_;
    return m;
  }

  static QuadForm2 from_matrix(const Eigen::Matrix2d& m) {
    return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)};
  }

  /// Value of the form for difference norms ||dx||^2, ||du||^2 and inner product <dx, du>.
  double evaluate(double dx_sq, double inner, double du_sq) const {
    return a11_ * dx_sq + 2.0 * a12_ * inner + a22_ * du_sq;
  }

  friend QuadForm2 operator+(const QuadForm2& a, const QuadForm2& b) {
    return {a.a11_ + b.a11_, a.a12_ + b.a12_, a.a22_ + b.a22_};
  }
  friend QuadForm2 operator-(const QuadForm2& a, const QuadForm2& b) {
    return {a.a11_ - b.a11_, a.a12_ - b.a12_, a.a22_ - b.a22_};
  }
  friend QuadForm2 operator*(double s, const QuadForm2& q) {
    return {s * q.a11_, s * q.a12_, s * q.a22_};
  }

  friend double max_abs_diff(const QuadForm2& a, const QuadForm2& b) {
    return std::max({std::abs(a.a11_ - b.a11_), std::abs(a.a12_ - b.a12_),
                     std::abs(a.a22_ - b.a22_)});
  }

  friend bool operator==(const QuadForm2&, const QuadForm2&) = default;

private:
  double a11_ = 0.0;
  double a12_ = 0.0;
  double a22_ = 0.0;
};

// ---------------------------------------------------------------------------
// Property tags

struct Monotone {};
struct StronglyMonotone {
  double mu;
};
struct Lipschitz {
  double beta;
};
/// (1/beta)-cocoercivity; `inv_beta` is the cocoercivity constant 1/beta.
struct Cocoercive {
  double inv_beta;
  double beta() const { return 1.0 / inv_beta; }
};
struct Averaged {
  double alpha;
};

using PropertyTag = std::variant<Monotone, StronglyMonotone, Lipschitz, Cocoercive, Averaged>;

inline void validate(const PropertyTag& tag) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, StronglyMonotone>) {
          detail::require_domain(t.mu > 0.0 && std::isfinite(t.mu),
                                 "StronglyMonotone requires mu > 0");
        } else if constexpr (std::is_same_v<T, Lipschitz>) {
          detail::require_domain(t.beta > 0.0 && std::isfinite(t.beta),
                                 "Lipschitz requires beta > 0");
        } else if constexpr (std::is_same_v<T, Cocoercive>) {
          detail::require_domain(t.inv_beta > 0.0 && std::isfinite(t.inv_beta),
                                 "Cocoercive requires a positive constant");
        } else if constexpr (std::is_same_v<T, Averaged>) {
          detail::require_domain(t.alpha > 0.0 && t.alpha < 1.0,
                                 "Averaged requires alpha in (0, 1)");
        }
      },
      tag);
}

inline std::string to_string(const PropertyTag& tag) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Monotone>) {
          return "Monotone";
        } else if constexpr (std::is_same_v<T, StronglyMonotone>) {
          return "StronglyMonotone(mu=" + detail::fmt_num(t.mu) + ")";
        } else if constexpr (std::is_same_v<T, Lipschitz>) {
          return "Lipschitz(beta=" + detail::fmt_num(t.beta) + ")";
        } else if constexpr (std::is_same_v<T, Cocoercive>) {
          return "Cocoercive(" + detail::fmt_num(t.inv_beta) + ")";
        } else {
          return "Averaged(alpha=" + detail::fmt_num(t.alpha) + ")";
        }
      },
      tag);
}

// ---------------------------------------------------------------------------
// Coordinate changes

/// S^T Q S for a 2x2 change of graph coordinates S.
inline QuadForm2 congruence(const QuadForm2& q, const Eigen::Matrix2d& s) {
  return QuadForm2::from_matrix(s.transpose() * q.matrix() * s);
}

/// Operator-graph form of a property.
inline QuadForm2 l_matrix(const PropertyTag& tag) {
  validate(tag);
  return std::visit(
      [](const auto& t) -> QuadForm2 {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Monotone>) {
          return {0.0, 1.0, 0.0};
        } else if constexpr (std::is_same_v<T, StronglyMonotone>) {
          return {-2.0 * t.mu, 1.0, 0.0};
        } else if constexpr (std::is_same_v<T, Lipschitz>) {
          return {t.beta * t.beta, 0.0, -1.0};
        } else if constexpr (std::is_same_v<T, Cocoercive>) {
          return {0.0, t.beta(), -2.0};
        } else {
          return {2.0 * t.alpha - 1.0, 1.0 - t.alpha, -1.0};
        }
      },
      tag);
}

inline const Eigen::Matrix2d& resolvent_transform() {
  static const Eigen::Matrix2d s = (Eigen::Matrix2d() << 0.0, 1.0, 1.0, -1.0).finished();
  return s;
}

inline const Eigen::Matrix2d& reflected_transform() {
  static const Eigen::Matrix2d s = (Eigen::Matrix2d() << 1.0, 1.0, 1.0, -1.0).finished();
  return s;
}

/// Resolvent-graph form of a property written out in closed form (independent of
/// the congruence route below).
inline QuadForm2 m_matrix(const PropertyTag& tag) {
  validate(tag);
  return std::visit(
      [](const auto& t) -> QuadForm2 {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Monotone>) {
          return {0.0, 1.0, -2.0};
        } else if constexpr (std::is_same_v<T, StronglyMonotone>) {
          return {0.0, 1.0, -2.0 * t.mu - 2.0};
        } else if constexpr (std::is_same_v<T, Lipschitz>) {
          return {-1.0, 1.0, t.beta * t.beta - 1.0};
        } else if constexpr (std::is_same_v<T, Cocoercive>) {
          const double b = t.beta();
          return {-2.0, b + 2.0, -2.0 * b - 2.0};
        } else {
          return {-1.0, 2.0 - t.alpha, 4.0 * t.alpha - 4.0};
        }
      },
      tag);
}

/// Reflected-resolvent-graph form of a property in closed form.
inline QuadForm2 n_matrix(const PropertyTag& tag) {
  validate(tag);
  return std::visit(
      [](const auto& t) -> QuadForm2 {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Monotone>) {
          return {2.0, 0.0, -2.0};
        } else if constexpr (std::is_same_v<T, StronglyMonotone>) {
          return 2.0 * QuadForm2{1.0 - t.mu, -t.mu, -1.0 - t.mu};
        } else if constexpr (std::is_same_v<T, Lipschitz>) {
          const double b2 = t.beta * t.beta;
          return {b2 - 1.0, b2 + 1.0, b2 - 1.0};
        } else if constexpr (std::is_same_v<T, Cocoercive>) {
          const double b = t.beta();
          return (2.0 / b) * QuadForm2{b - 1.0, 1.0, -b - 1.0};
        } else {
          return 2.0 * QuadForm2{0.0, t.alpha, -2.0 * (1.0 - t.alpha)};
        }
      },
      tag);
}

/// Form on gra J_A equivalent to the form `l` on gra A.
inline QuadForm2 to_resolvent_form(const QuadForm2& l) {
  return congruence(l, resolvent_transform());
}

/// Form on gra R_A equivalent to the form `l` on gra A.
inline QuadForm2 to_reflected_form(const QuadForm2& l) {
  return congruence(l, reflected_transform());
}

/// Form on gra A^{-1}: the roles of the two graph components swap.
inline QuadForm2 to_inverse_form(const QuadForm2& l) { return {l.a22(), l.a12(), l.a11()}; }

/// Form on the graph of -T when `l` holds on gra T.
inline QuadForm2 to_negated_output_form(const QuadForm2& l) { return {l.a11(), -l.a12(), l.a22()}; }

struct ConicTerm {
  double coeff;
  QuadForm2 form;
};

inline QuadForm2 conic_sum(std::span<const ConicTerm> terms) {
  QuadForm2 sum;
  for (const auto& t : terms) {
    detail::require_domain(t.coeff >= 0.0, "conic combination needs non-negative coefficients");
    sum = sum + t.coeff * t.form;
  }
  return sum;
}

/// True iff target equals the non-negative combination of the terms entrywise to `tol`.
inline bool check_conic_identity(const QuadForm2& target, std::span<const ConicTerm> terms,
                                 double tol) {
  detail::require_domain(tol > 0.0, "tolerance must be positive");
  return max_abs_diff(target, conic_sum(terms)) <= tol;
}

inline bool check_conic_identity(const QuadForm2& target, std::initializer_list<ConicTerm> terms,
                                 double tol) {
  return check_conic_identity(target, std::span<const ConicTerm>(terms.begin(), terms.size()),
                              tol);
}

/// True iff target minus the combination is positive semidefinite (up to `tol`), so
/// the target inequality follows from the term inequalities.
inline bool check_conic_dominance(const QuadForm2& target, std::span<const ConicTerm> terms,
                                  double tol) {
  detail::require_domain(tol > 0.0, "tolerance must be positive");
  const QuadForm2 d = target - conic_sum(terms);
  const double tr = d.a11() + d.a22();
  const double disc = std::hypot(d.a11() - d.a22(), 2.0 * d.a12());
  return 0.5 * (tr - disc) >= -tol;
}

inline bool check_conic_dominance(const QuadForm2& target, std::initializer_list<ConicTerm> terms,
                                  double tol) {
  return check_conic_dominance(target, std::span<const ConicTerm>(terms.begin(), terms.size()),
                               tol);
}

// ---------------------------------------------------------------------------
// Graph samples

/// Two graph points (x, u) and (y, v).
struct GraphPair {
  Vector x, u, y, v;
};

struct GraphSample {
  std::vector<GraphPair> pairs;

  Index dim() const { return pairs.empty() ? 0 : pairs.front().x.size(); }

  void check() const {
    detail::require_dims(!pairs.empty(), "graph sample is empty");
    const Index n = pairs.front().x.size();
    for (const auto& p : pairs) {
      detail::require_dims(p.x.size() == n && p.u.size() == n && p.y.size() == n &&
                               p.v.size() == n,
                           "graph sample has inconsistent dimensions");
    }
  }
};

inline double evaluate(const QuadForm2& q, const GraphPair& p) {
  const Vector dx = p.x - p.y;
  const Vector du = p.u - p.v;
  return q.evaluate(dx.squaredNorm(), dx.dot(du), du.squaredNorm());
}

/// Smallest value of the form over the sample; `normalized` divides each value by
/// ||x - y||^2 + ||u - v||^2.
inline double worst_margin(const QuadForm2& q, const GraphSample& sample, bool normalized = false) {
  sample.check();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : sample.pairs) {
    double val = evaluate(q, p);
    if (normalized) {
      const double scale = (p.x - p.y).squaredNorm() + (p.u - p.v).squaredNorm();
      val = scale > 0.0 ? val / scale : 0.0;
    }
    worst = std::min(worst, val);
  }
  return worst;
}

/// True iff the inequality evaluates to at least -tol on every pair.
inline bool holds_on_sample(const QuadForm2& q, const GraphSample& sample, double tol) {
  return worst_margin(q, sample) >= -tol;
}

/// Maps a sample of gra A to gra J_A: (x, u) -> (x + u, x).
inline GraphSample to_resolvent_graph(const GraphSample& s) {
  GraphSample out;
  out.pairs.reserve(s.pairs.size());
  for (const auto& p : s.pairs) {
    out.pairs.push_back({p.x + p.u, p.x, p.y + p.v, p.y});
  }
  return out;
}

/// Maps a sample of gra A to gra R_A: (x, u) -> (x + u, x - u).
inline GraphSample to_reflected_graph(const GraphSample& s) {
  GraphSample out;
  out.pairs.reserve(s.pairs.size());
  for (const auto& p : s.pairs) {
    out.pairs.push_back({p.x + p.u, p.x - p.u, p.y + p.v, p.y - p.v});
  }
  return out;
}

inline GraphSample to_inverse_graph(const GraphSample& s) {
  GraphSample out;
  out.pairs.reserve(s.pairs.size());
  for (const auto& p : s.pairs) {
    out.pairs.push_back({p.u, p.x, p.v, p.y});
  }
  return out;
}

inline Vector standard_normal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = nd(rng);
  }
  return v;
}

/// Samples gra M of a square linear map at standard normal points.
inline GraphSample sample_linear_graph(const Matrix& m, std::size_t n_pairs, std::uint64_t seed) {
  detail::require_dims(m.rows() == m.cols(), "linear graph sampling needs a square matrix");
  std::mt19937_64 rng(seed);
  GraphSample s;
  s.pairs.reserve(n_pairs);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    Vector x = standard_normal(m.rows(), rng);
    Vector y = standard_normal(m.rows(), rng);
    Vector u = m * x;
    Vector v = m * y;
    s.pairs.push_back({std::move(x), std::move(u), std::move(y), std::move(v)});
  }
  return s;
}

}  // namespace drs
