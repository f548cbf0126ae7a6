#pragma once

// Finite-dimensional maximally monotone operators with closed-form resolvents.
//
// Every operator is an immutable OperatorSpec: a structural kind plus the
// property tags it claims. Claims are checked by graph sampling when the
// operator is built. Linear resolvents are factorized once per step length
// and cached; the cache is shared by copies and is safe to use concurrently.

#include "drsplit/core.hpp"
#include "drsplit/linalg.hpp"
#include "drsplit/quadform.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace drs {

class OperatorSpec;

/// x -> M x for a square monotone matrix M.
struct DenseLinear {
  Matrix matrix;
};

/// The block skew operator (x, y) -> (L^T y, -L x) on R^cols(L) x R^rows(L).
struct SkewFromL {
  Matrix L;
};

/// beta * [[0, 1], [-1, 0]] on R^2.
struct Rotation2 {
  double beta;
};

/// x -> Q x + c, gradient of the convex quadratic 1/2 x^T Q x + c^T x.
struct QuadraticGradient {
  Matrix Q;
  Vector c;
};

/// mu * Id + N_C with C = span(basis); the basis columns are orthonormal and may be
/// empty, in which case C = {0}.
struct ScaledIdPlusNormalConeSubspace {
  double mu;
  Matrix basis;
};

/// Subdifferential of g* for g(y) = 1/2 y^T S y + t^T y with S positive semidefinite.
struct InverseQuadraticGradient {
  Matrix S;
  Vector t;
};

/// left x right acting blockwise on the product space.
struct ProductPair {
  std::shared_ptr<const OperatorSpec> left;
  std::shared_ptr<const OperatorSpec> right;
};

using OperatorKind = std::variant<DenseLinear, SkewFromL, Rotation2, QuadraticGradient,
                                  ScaledIdPlusNormalConeSubspace, InverseQuadraticGradient,
                                  ProductPair>;

struct ValidationOptions {
  std::size_t n_samples = 200;
  std::uint64_t seed = 42;
  double tol = 1e-9;
};

struct ClaimCheck {
  PropertyTag tag;
  bool passed;
  /// Smallest normalized value of the tag's inequality over the sampled graph pairs.
  double worst_margin;
};

struct ClaimReport {
  std::vector<ClaimCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) {
        return false;
      }
    }
    return true;
  }
};

namespace detail {

/// Cached solver for (Id + gamma * A) z = w with A = [[0, L^T], [-L, 0]].
class SkewBlockSolver {
public:
  SkewBlockSolver(const Matrix& l, double gamma)
      : l_(l), gamma_(gamma),
        llt_(Matrix::Identity(l.cols(), l.cols()) + gamma * gamma * l.transpose() * l) {}

  Vector solve(const Vector& w) const {
    const Index n = l_.cols();
    const Index m = l_.rows();
    require_dims(w.size() == n + m, "skew product resolvent: dimension mismatch");
    const auto w1 = w.head(n);
    const auto w2 = w.tail(m);
    Vector z(n + m);
    z.head(n) = llt_.solve(w1 - gamma_ * (l_.transpose() * w2));
    z.tail(m) = w2 + gamma_ * (l_ * z.head(n));
    return z;
  }

private:
  Matrix l_;
  double gamma_;
  Eigen::LLT<Matrix> llt_;
};

using Factorization =
    std::variant<Eigen::LLT<Matrix>, Eigen::PartialPivLU<Matrix>, SkewBlockSolver>;

/// Write-once factorizations keyed by step length.
class ResolventCache {
public:
  template <class Make>
  std::shared_ptr<const Factorization> get(double gamma, Make&& make) {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(gamma);
    if (it != entries_.end()) {
      return it->second;
    }
    auto f = std::make_shared<const Factorization>(make());
    entries_.emplace(gamma, f);
    return f;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

private:
  mutable std::mutex mutex_;
  std::map<double, std::shared_ptr<const Factorization>> entries_;
};

}  // namespace detail

class OperatorSpec {
public:
  /// Builds the operator and checks every claim by graph sampling; throws ClaimRefuted.
  OperatorSpec(OperatorKind kind, std::vector<PropertyTag> claims, ValidationOptions opts = {})
      : OperatorSpec(std::move(kind), std::move(claims), Unchecked{}) {
    check_claims(opts);
  }

  /// Builds the operator without sampling its claims.
  static OperatorSpec unchecked(OperatorKind kind, std::vector<PropertyTag> claims) {
    return OperatorSpec(std::move(kind), std::move(claims), Unchecked{});
  }

  const OperatorKind& kind() const { return *kind_; }
  const std::vector<PropertyTag>& claims() const { return claims_; }
  Index dim() const { return dim_; }

  std::string name() const;
  bool is_linear() const;
  bool is_skew() const;
  bool is_single_valued() const { return single_valued_; }

  /// The unique y with x in y + gamma * A(y).
  Vector resolvent(const Vector& x, double gamma = 1.0) const;

  /// 2 J_{gamma A} x - x.
  Vector reflected_resolvent(const Vector& x, double gamma = 1.0) const {
    return 2.0 * resolvent(x, gamma) - x;
  }

  /// A(x) for single-valued operators.
  Vector apply(const Vector& x) const;

  /// Samples graph pairs: direct evaluation for single-valued operators, the
  /// resolvent parametrization (J w, w - J w) otherwise.
  GraphSample sample_graph(std::size_t n_pairs, std::uint64_t seed) const;

  std::size_t cached_factorizations() const { return cache_->size(); }

private:
  struct Unchecked {};

  OperatorSpec(OperatorKind kind, std::vector<PropertyTag> claims, Unchecked)
      : kind_(std::make_shared<const OperatorKind>(std::move(kind))), claims_(std::move(claims)),
        cache_(std::make_shared<detail::ResolventCache>()) {
    for (const auto& c : claims_) {
      validate(c);
    }
    dim_ = check_structure();
    single_valued_ = compute_single_valued();
  }

  Index check_structure() const;
  bool compute_single_valued() const;
  void check_claims(const ValidationOptions& opts) const;

  std::shared_ptr<const OperatorKind> kind_;
  std::vector<PropertyTag> claims_;
  std::shared_ptr<detail::ResolventCache> cache_;
  Index dim_ = 0;
  bool single_valued_ = true;
};

/// Empirical corroboration of every claimed tag on `n_samples` graph pairs.
inline ClaimReport validate_claims(const OperatorSpec& op, std::size_t n_samples,
                                   std::uint64_t seed, double tol = 1e-9) {
  detail::require_domain(n_samples >= 1, "validate_claims needs at least one sample");
  const GraphSample sample = op.sample_graph(n_samples, seed);
  ClaimReport report;
  for (const auto& tag : op.claims()) {
    const double margin = worst_margin(l_matrix(tag), sample, /*normalized=*/true);
    report.checks.push_back({tag, margin >= -tol, margin});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Implementation

inline Index OperatorSpec::check_structure() const {
  using detail::require_dims;
  using detail::require_domain;
  return std::visit(
      [](const auto& k) -> Index {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseLinear>) {
          require_dims(k.matrix.rows() == k.matrix.cols() && k.matrix.rows() > 0,
                       "DenseLinear needs a non-empty square matrix");
          require_domain(k.matrix.allFinite(), "DenseLinear matrix must be finite");
          return k.matrix.rows();
        } else if constexpr (std::is_same_v<T, SkewFromL>) {
          require_dims(k.L.size() > 0, "SkewFromL needs a non-empty L");
          require_domain(k.L.allFinite(), "SkewFromL matrix must be finite");
          return k.L.rows() + k.L.cols();
        } else if constexpr (std::is_same_v<T, Rotation2>) {
          require_domain(std::isfinite(k.beta) && k.beta >= 0.0, "Rotation2 needs beta >= 0");
          return 2;
        } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
          require_dims(k.Q.rows() == k.Q.cols() && k.Q.rows() == k.c.size() && k.Q.rows() > 0,
                       "QuadraticGradient needs square Q matching c");
          require_domain(is_symmetric(k.Q), "QuadraticGradient needs symmetric Q");
          const double scale = std::max(1.0, k.Q.cwiseAbs().maxCoeff());
          require_domain(symmetric_eigen_extremes(k.Q).min >= -1e-12 * scale,
                         "QuadraticGradient needs positive semidefinite Q");
          return k.Q.rows();
        } else if constexpr (std::is_same_v<T, ScaledIdPlusNormalConeSubspace>) {
          require_domain(std::isfinite(k.mu) && k.mu >= 0.0,
                         "ScaledIdPlusNormalConeSubspace needs mu >= 0");
          require_dims(k.basis.rows() > 0, "ScaledIdPlusNormalConeSubspace needs a dimension");
          if (k.basis.cols() > 0) {
            const Matrix gram = k.basis.transpose() * k.basis;
            require_domain(
                (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-10,
                "subspace basis must be orthonormal");
          }
          return k.basis.rows();
        } else if constexpr (std::is_same_v<T, InverseQuadraticGradient>) {
          require_dims(k.S.rows() == k.S.cols() && k.S.rows() == k.t.size() && k.S.rows() > 0,
                       "InverseQuadraticGradient needs square S matching t");
          require_domain(is_symmetric(k.S), "InverseQuadraticGradient needs symmetric S");
          const double scale = std::max(1.0, k.S.cwiseAbs().maxCoeff());
          require_domain(symmetric_eigen_extremes(k.S).min >= -1e-12 * scale,
                         "InverseQuadraticGradient needs positive semidefinite S");
          return k.S.rows();
        } else {
          require_dims(k.left && k.right, "ProductPair needs two operators");
          return k.left->dim() + k.right->dim();
        }
      },
      *kind_);
}

inline std::string OperatorSpec::name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseLinear>) {
          return "DenseLinear";
        } else if constexpr (std::is_same_v<T, SkewFromL>) {
          return "SkewFromL";
        } else if constexpr (std::is_same_v<T, Rotation2>) {
          return "Rotation2";
        } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
          return "QuadraticGradient";
        } else if constexpr (std::is_same_v<T, ScaledIdPlusNormalConeSubspace>) {
          return "ScaledIdPlusNormalConeSubspace";
        } else if constexpr (std::is_same_v<T, InverseQuadraticGradient>) {
          return "InverseQuadraticGradient";
        } else {
          return "ProductPair(" + k.left->name() + ", " + k.right->name() + ")";
        }
      },
      *kind_);
}

inline bool OperatorSpec::is_linear() const {
  return std::visit(
      [](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseLinear> || std::is_same_v<T, SkewFromL> ||
                      std::is_same_v<T, Rotation2>) {
          return true;
        } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
          return k.c.isZero(0.0);
        } else if constexpr (std::is_same_v<T, ScaledIdPlusNormalConeSubspace>) {
          // Single-valued (hence linear) only when C is the whole space.
          return k.basis.cols() == k.basis.rows();
        } else if constexpr (std::is_same_v<T, InverseQuadraticGradient>) {
          return false;
        } else {
          return k.left->is_linear() && k.right->is_linear();
        }
      },
      *kind_);
}

inline bool OperatorSpec::is_skew() const {
  return std::visit(
      [](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseLinear>) {
          return drs::is_skew(k.matrix);
        } else if constexpr (std::is_same_v<T, SkewFromL> || std::is_same_v<T, Rotation2>) {
          return true;
        } else if constexpr (std::is_same_v<T, ProductPair>) {
          return k.left->is_skew() && k.right->is_skew();
        } else {
          return false;
        }
      },
      *kind_);
}

inline bool OperatorSpec::compute_single_valued() const {
  return std::visit(
      [](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ScaledIdPlusNormalConeSubspace>) {
          return k.basis.cols() == k.basis.rows();
        } else if constexpr (std::is_same_v<T, InverseQuadraticGradient>) {
          const double scale = std::max(1.0, k.S.cwiseAbs().maxCoeff());
          return symmetric_eigen_extremes(k.S).min > 1e-12 * scale;
        } else if constexpr (std::is_same_v<T, ProductPair>) {
          return k.left->is_single_valued() && k.right->is_single_valued();
        } else {
          return true;
        }
      },
      *kind_);
}

inline Vector OperatorSpec::resolvent(const Vector& x, double gamma) const {
  detail::require_domain(gamma > 0.0 && std::isfinite(gamma), "resolvent needs gamma > 0");
  detail::require_dims(x.size() == dim_, "resolvent: dimension mismatch (expected " +
                                             std::to_string(dim_) + ", got " +
                                             std::to_string(x.size()) + ")");
  return std::visit(
      [&](const auto& k) -> Vector {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseLinear>) {
          auto f = cache_->get(gamma, [&] {
            return detail::Factorization(Eigen::PartialPivLU<Matrix>(
                Matrix::Identity(dim_, dim_) + gamma * k.matrix));
          });
          return std::get<Eigen::PartialPivLU<Matrix>>(*f).solve(x);
        } else if constexpr (std::is_same_v<T, SkewFromL>) {
          auto f = cache_->get(gamma, [&] {
            return detail::Factorization(detail::SkewBlockSolver(k.L, gamma));
          });
          return std::get<detail::SkewBlockSolver>(*f).solve(x);
        } else if constexpr (std::is_same_v<T, Rotation2>) {
          // (Id + g*b*[[0,1],[-1,0]])^{-1} = [[1, -g*b], [g*b, 1]] / (1 + (g*b)^2)
          const double s = gamma * k.beta;
          const double d = 1.0 / (1.0 + s * s);
          Vector y(2);
          y << d * (x[0] - s * x[1]), d * (s * x[0] + x[1]);
          return y;
        } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
          auto f = cache_->get(gamma, [&] {
            return detail::Factorization(
                Eigen::LLT<Matrix>(Matrix::Identity(dim_, dim_) + gamma * k.Q));
          });
          return std::get<Eigen::LLT<Matrix>>(*f).solve(x - gamma * k.c);
        } else if constexpr (std::is_same_v<T, ScaledIdPlusNormalConeSubspace>) {
          // ((1 + g*mu) Id + N_C)^{-1} = P_C / (1 + g*mu)
          if (k.basis.cols() == 0) {
            return Vector::Zero(dim_);
          }
          return (k.basis * (k.basis.transpose() * x)) / (1.0 + gamma * k.mu);
        } else if constexpr (std::is_same_v<T, InverseQuadraticGradient>) {
          // J_{g dg*}(w) = w - g * prox_{g/g}(w/g); the prox solves (g Id + S) u = w - t.
          auto f = cache_->get(gamma, [&] {
            return detail::Factorization(
                Eigen::LLT<Matrix>(gamma * Matrix::Identity(dim_, dim_) + k.S));
          });
          const Vector u = std::get<Eigen::LLT<Matrix>>(*f).solve(x - k.t);
          return x - gamma * u;
        } else {
          const Index n = k.left->dim();
          Vector y(dim_);
          y.head(n) = k.left->resolvent(x.head(n), gamma);
          y.tail(dim_ - n) = k.right->resolvent(x.tail(dim_ - n), gamma);
          return y;
        }
      },
      *kind_);
}

inline Vector OperatorSpec::apply(const Vector& x) const {
  detail::require_dims(x.size() == dim_, "apply: dimension mismatch");
  return std::visit(
      [&](const auto& k) -> Vector {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseLinear>) {
          return k.matrix * x;
        } else if constexpr (std::is_same_v<T, SkewFromL>) {
          const Index n = k.L.cols();
          Vector y(dim_);
          y.head(n) = k.L.transpose() * x.tail(k.L.rows());
          y.tail(k.L.rows()) = -(k.L * x.head(n));
          return y;
        } else if constexpr (std::is_same_v<T, Rotation2>) {
          Vector y(2);
          y << k.beta * x[1], -k.beta * x[0];
          return y;
        } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
          return k.Q * x + k.c;
        } else if constexpr (std::is_same_v<T, ScaledIdPlusNormalConeSubspace>) {
          if (k.basis.cols() != k.basis.rows()) {
            throw std::logic_error("apply: normal cone of a proper subspace is set-valued");
          }
          return k.mu * x;
        } else if constexpr (std::is_same_v<T, InverseQuadraticGradient>) {
          if (!is_single_valued()) {
            throw std::logic_error("apply: inverse gradient of a singular quadratic is set-valued");
          }
          // Key 0 never collides with a resolvent step length (those are > 0).
          auto f = cache_->get(0.0, [&] { return detail::Factorization(Eigen::LLT<Matrix>(k.S)); });
          return std::get<Eigen::LLT<Matrix>>(*f).solve(x - k.t);
        } else {
          const Index n = k.left->dim();
          Vector y(dim_);
          y.head(n) = k.left->apply(x.head(n));
          y.tail(dim_ - n) = k.right->apply(x.tail(dim_ - n));
          return y;
        }
      },
      *kind_);
}

inline GraphSample OperatorSpec::sample_graph(std::size_t n_pairs, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  const bool direct = is_single_valued();
  GraphSample s;
  s.pairs.reserve(n_pairs);
  auto point = [&](Vector& x, Vector& u) {
    Vector w = standard_normal(dim_, rng);
    if (direct) {
      u = apply(w);
      x = std::move(w);
    } else {
      x = resolvent(w, 1.0);
      u = w - x;
    }
  };
  for (std::size_t k = 0; k < n_pairs; ++k) {
    GraphPair p;
    point(p.x, p.u);
    point(p.y, p.v);
    s.pairs.push_back(std::move(p));
  }
  return s;
}

inline void OperatorSpec::check_claims(const ValidationOptions& opts) const {
  if (claims_.empty()) {
    return;
  }
  const ClaimReport report = validate_claims(*this, opts.n_samples, opts.seed, opts.tol);
  for (const auto& c : report.checks) {
    if (!c.passed) {
      throw ClaimRefuted(name() + " does not satisfy " + to_string(c.tag) +
                         " (worst normalized margin " + detail::fmt_num(c.worst_margin) + ")");
    }
  }
}

// ---------------------------------------------------------------------------
// Free-function surface

inline Vector resolvent(const OperatorSpec& op, const Vector& x, double gamma = 1.0) {
  return op.resolvent(x, gamma);
}

inline Vector reflected_resolvent(const OperatorSpec& op, const Vector& x, double gamma = 1.0) {
  return op.reflected_resolvent(x, gamma);
}

/// Solves (Id + gamma * A) z = w for the block skew operator built from L.
inline Vector skew_product_resolvent(const Matrix& l, const Vector& w, double gamma = 1.0) {
  detail::require_domain(gamma > 0.0, "skew_product_resolvent needs gamma > 0");
  return detail::SkewBlockSolver(l, gamma).solve(w);
}

// Convenience constructors.

inline OperatorSpec make_rotation2(double beta, std::vector<PropertyTag> claims = {},
                                   ValidationOptions opts = {}) {
  return {Rotation2{beta}, std::move(claims), opts};
}

/// N_{0} on R^n: the normal cone of the origin, resolvent identically zero.
inline OperatorSpec make_zero_cone(Index n, std::vector<PropertyTag> claims = {},
                                   ValidationOptions opts = {}) {
  return {ScaledIdPlusNormalConeSubspace{0.0, Matrix(n, 0)}, std::move(claims), opts};
}

inline OperatorSpec make_product(const OperatorSpec& left, const OperatorSpec& right,
                                 std::vector<PropertyTag> claims = {},
                                 ValidationOptions opts = {}) {
  return {ProductPair{std::make_shared<const OperatorSpec>(left),
                      std::make_shared<const OperatorSpec>(right)},
          std::move(claims), opts};
}

}  // namespace drs
