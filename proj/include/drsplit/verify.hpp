#pragma once

// Machine check of the matrix identities and sampled inequalities behind the
// contraction factors: property-row congruences, conic identities between
// property forms, resolvent inequalities for Lipschitz and skew operators, the
// non-averaged rotation example and the sharp 2x2 example.

#include "drsplit/core.hpp"
#include "drsplit/engine.hpp"
#include "drsplit/operators.hpp"
#include "drsplit/quadform.hpp"
#include "drsplit/random.hpp"
#include "drsplit/rates.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace drs::verify {

struct CheckResult {
  std::string name;
  bool passed = true;
  /// Identities: largest entrywise error. Inequalities: smallest margin.
  double worst = 0.0;
  int cases = 0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int param_draws = 20;
  int operators = 10;
  int pairs = 10000;
  int max_dim = 8;
  double identity_tol = 1e-9;
  double table_tol = 1e-12;
  double sample_tol = 1e-9;
};

namespace detail {

/// Accumulates entrywise errors of an identity over parameter draws.
class IdentityCheck {
public:
  IdentityCheck(std::string name, double tol) : res_{std::move(name)}, tol_(tol) {}

  void record(double err) {
    ++res_.cases;
    res_.worst = std::max(res_.worst, err);
    if (!(err <= tol_)) {
      res_.passed = false;
    }
  }

  void record(const QuadForm2& lhs, const QuadForm2& rhs) { record(max_abs_diff(lhs, rhs)); }

  CheckResult done() && { return std::move(res_); }

private:
  CheckResult res_;
  double tol_;
};

/// Accumulates margins of an inequality (margin >= -tol passes).
class MarginCheck {
public:
  MarginCheck(std::string name, double tol) : res_{std::move(name)}, tol_(tol) {
    res_.worst = std::numeric_limits<double>::infinity();
  }

  void record(double margin) {
    ++res_.cases;
    res_.worst = std::min(res_.worst, margin);
    if (!(margin >= -tol_)) {
      res_.passed = false;
    }
  }

  CheckResult done() && { return std::move(res_); }

private:
  CheckResult res_;
  double tol_;
};

struct Params {
  double mu;
  double beta;  // beta >= mu
  double alpha;
  double mu_unit;  // in (0, 1)
};

inline Params draw(std::mt19937_64& rng) {
  Params p;
  p.mu = random::log_uniform(0.01, 5.0, rng);
  p.beta = p.mu * random::log_uniform(1.0, 20.0, rng);
  p.alpha = random::uniform(0.01, 0.99, rng);
  p.mu_unit = random::uniform(0.01, 0.99, rng);
  return p;
}

inline QuadForm2 diag(double a, double b) { return {a, 0.0, b}; }

/// Lipschitz constant encoded by diag(c1, -c2) (c1 ||dx||^2 >= c2 ||du||^2).
inline double lipschitz_of_diag(const QuadForm2& d) { return std::sqrt(d.a11() / -d.a22()); }

}  // namespace detail

/// Positive c with a = c b (least squares), or 0 when none fits.
inline double positive_factor(const QuadForm2& a, const QuadForm2& b) {
  const double bb = b.a11() * b.a11() + 2.0 * b.a12() * b.a12() + b.a22() * b.a22();
  const double ab = a.a11() * b.a11() + 2.0 * a.a12() * b.a12() + a.a22() * b.a22();
  return bb > 0.0 ? std::max(0.0, ab / bb) : 0.0;
}

/// Property rows: congruence of the operator-graph row against the closed-form rows.
/// Resolvent rows must match entrywise; reflected rows must describe the same
/// inequality (equal up to a positive factor). Rows that match only up to a factor
/// are listed in the detail string.
inline std::vector<CheckResult> check_property_rows(const VerifyOptions& o, std::mt19937_64& rng) {
  detail::IdentityCheck res("rows.resolvent_form", o.table_tol);
  detail::IdentityCheck ref("rows.reflected_form_equivalent", o.table_tol);
  std::vector<std::string> rescaled;
  for (int k = 0; k < o.param_draws; ++k) {
    const auto p = detail::draw(rng);
    const PropertyTag tags[] = {Monotone{}, StronglyMonotone{p.mu}, Lipschitz{p.beta},
                                Cocoercive{1.0 / p.beta}, Averaged{p.alpha}};
    for (const auto& tag : tags) {
      const QuadForm2 l = l_matrix(tag);
      // Scale-relative comparison: entries grow like beta^2.
      const double scale = std::max(1.0, p.beta * p.beta);
      res.record(max_abs_diff(to_resolvent_form(l), m_matrix(tag)) / scale);
      const QuadForm2 n = to_reflected_form(l);
      const QuadForm2 printed = n_matrix(tag);
      if (max_abs_diff(n, printed) / scale <= o.table_tol) {
        ref.record(0.0);
        continue;
      }
      const double c = positive_factor(n, printed);
      ref.record(c > 0.0 ? max_abs_diff(n, c * printed) / scale : 1.0);
      const std::string name = to_string(tag).substr(0, to_string(tag).find('('));
      if (std::find(rescaled.begin(), rescaled.end(), name) == rescaled.end()) {
        rescaled.push_back(name);
      }
    }
  }
  CheckResult r = std::move(ref).done();
  for (const auto& name : rescaled) {
    r.detail += (r.detail.empty() ? "equal only up to a positive factor: " : ", ") + name;
  }
  return {std::move(res).done(), std::move(r)};
}

/// Conic identities that turn property forms into the stated consequences.
inline std::vector<CheckResult> check_conic_identities(const VerifyOptions& o,
                                                       std::mt19937_64& rng) {
  using detail::diag;
  const double tol = o.identity_tol;
  detail::IdentityCheck strong_lip_coco("identity.strong_lipschitz_is_cocoercive", tol);
  detail::IdentityCheck nonexp("identity.monotone_nonexpansive_resolvent_forms", tol);
  detail::IdentityCheck strong_res("identity.strong_monotone_resolvent_forms", tol);
  detail::IdentityCheck strong_coco("identity.strong_cocoercive_reflected_contraction", tol);
  detail::IdentityCheck strong_lip("identity.strong_lipschitz_reflected_contraction", tol);
  detail::IdentityCheck strong_lip_alt("identity.strong_lipschitz_via_cocoercive", tol);
  detail::IdentityCheck strong_avg("identity.strong_averaged_reflected_contraction", tol);
  detail::IdentityCheck expansion("identity.lipschitz_resolvent_expansion_bound", tol);
  detail::IdentityCheck id_minus("identity.identity_minus_resolvent_contraction", tol);
  detail::IdentityCheck res_strong("identity.lipschitz_resolvent_strong_monotone", tol);
  detail::IdentityCheck hypo("identity.reflected_hypomonotone_congruence", tol);

  for (int k = 0; k < o.param_draws; ++k) {
    const auto p = detail::draw(rng);
    const double mu = p.mu;
    const double beta = p.beta;
    const double b2 = beta * beta;
    const double scale = std::max(1.0, b2);
    const QuadForm2 l_sm = l_matrix(StronglyMonotone{mu});
    const QuadForm2 l_lip = l_matrix(Lipschitz{beta});
    const QuadForm2 half_n_sm = 0.5 * n_matrix(StronglyMonotone{mu});

    // Strongly monotone + Lipschitz is (mu/beta^2)-cocoercive.
    {
      const QuadForm2 target = l_matrix(Cocoercive{mu / b2});
      const ConicTerm terms[] = {{b2 / mu, l_sm}, {2.0, l_lip}};
      strong_lip_coco.record(max_abs_diff(target, conic_sum(terms)) / std::max(1.0, b2 / mu));
    }
    // Nonexpansive: J_A is 1/2-strongly monotone, R_A is monotone.
    {
      nonexp.record(to_resolvent_form(l_matrix(Lipschitz{1.0})), l_matrix(StronglyMonotone{0.5}));
      nonexp.record(to_reflected_form(l_matrix(Lipschitz{1.0})), 2.0 * l_matrix(Monotone{}));
    }
    // Strong monotonicity <=> J_A (1+mu)-cocoercive <=> -R_A (1+mu)^{-1}-averaged.
    {
      strong_res.record(to_resolvent_form(l_sm),
                        (1.0 + mu) * l_matrix(Cocoercive{1.0 + mu}));
      strong_res.record(to_negated_output_form(to_reflected_form(l_sm)),
                        2.0 * (1.0 + mu) * l_matrix(Averaged{1.0 / (1.0 + mu)}));
    }
    // Strongly monotone + cocoercive.
    {
      const QuadForm2 target = diag(1.0 - 2.0 * mu + mu * beta, -(1.0 + 2.0 * mu + mu * beta));
      const QuadForm2 half_coco = (beta / 2.0) * n_matrix(Cocoercive{1.0 / beta});
      const ConicTerm terms[] = {{1.0, half_n_sm}, {mu, half_coco}};
      strong_coco.record(max_abs_diff(target, conic_sum(terms)) / scale);
      strong_coco.record(
          std::abs(detail::lipschitz_of_diag(target) - reflected_factor_strong_coco(mu, beta)));
    }
    // Strongly monotone + Lipschitz.
    {
      const QuadForm2 target = diag(1.0 - 2.0 * mu + b2, -(1.0 + 2.0 * mu + b2));
      const ConicTerm terms[] = {{b2 + 1.0, half_n_sm}, {mu, n_matrix(Lipschitz{beta})}};
      strong_lip.record(max_abs_diff(target, conic_sum(terms)) / scale);
      strong_lip.record(
          std::abs(detail::lipschitz_of_diag(target) - reflected_factor_strong_lip(mu, beta)));
      strong_lip_alt.record(std::abs(reflected_factor_strong_coco(mu, b2 / mu) -
                                     reflected_factor_strong_lip(mu, beta)));
    }
    // Strongly monotone + averaged (needs mu < 1).
    {
      const double m1 = p.mu_unit;
      const double a = p.alpha;
      const QuadForm2 target = diag(a * (1.0 - m1), -(a * (1.0 - m1) + 2.0 * m1));
      const ConicTerm terms[] = {{a, 0.5 * n_matrix(StronglyMonotone{m1})},
                                 {m1, 0.5 * n_matrix(Averaged{a})}};
      strong_avg.record(max_abs_diff(target, conic_sum(terms)));
      strong_avg.record(
          std::abs(detail::lipschitz_of_diag(target) - reflected_factor_averaged(m1, a)));
    }

    const QuadForm2 m_lip = m_matrix(Lipschitz{beta});
    const QuadForm2 expand = diag(-1.0, (1.0 + beta) * (1.0 + beta));
    // ||x - y|| <= (1 + beta) ||J x - J y||: dominance over the resolvent Lipschitz row.
    {
      const ConicTerm terms[] = {{(beta + 1.0) / beta, m_lip}};
      expansion.record(check_conic_dominance(expand, terms, tol * scale) ? 0.0
                                                                         : std::abs(expand.a22()));
    }
    // Id - J_A = J_{A^{-1}} is a beta/sqrt(1+beta^2) contraction.
    {
      const QuadForm2 p_lip = to_resolvent_form(to_inverse_form(l_lip));
      const QuadForm2 p_mono = to_resolvent_form(to_inverse_form(l_matrix(Monotone{})));
      id_minus.record(max_abs_diff(p_lip, QuadForm2{b2, -b2, b2 - 1.0}) / scale);
      id_minus.record(p_mono, QuadForm2{0.0, 1.0, -2.0});
      const QuadForm2 target = diag(b2, -(1.0 + b2));
      const ConicTerm terms[] = {{1.0, p_lip}, {b2, p_mono}};
      id_minus.record(max_abs_diff(target, conic_sum(terms)) / scale);
      id_minus.record(std::abs(detail::lipschitz_of_diag(target) - beta / std::sqrt(1.0 + b2)));
    }
    // J_A strongly monotone with modulus 1/(2(1+beta)^2) + 1/(2(1+beta^2)).
    {
      const double c = 1.0 / (2.0 * (1.0 + beta) * (1.0 + beta)) + 1.0 / (2.0 * (1.0 + b2));
      const QuadForm2 target = l_matrix(StronglyMonotone{c});
      const ConicTerm terms[] = {{1.0 / (b2 + 1.0), m_lip},
                                 {b2 / (1.0 + b2), m_matrix(Monotone{})},
                                 {1.0 / ((1.0 + beta) * (1.0 + beta)), expand}};
      res_strong.record(max_abs_diff(target, conic_sum(terms)));
    }
    // From gra J_A to gra R_A: the strong monotonicity of J_A becomes hypomonotonicity.
    {
      const double lam = lambda_hypo(beta);
      const Eigen::Matrix2d g = (Eigen::Matrix2d() << 2.0, 0.0, 1.0, 1.0).finished();
      const QuadForm2 on_ra = congruence(QuadForm2{lam - 1.0, 1.0, 0.0}, g);
      hypo.record(on_ra, QuadForm2{4.0 * lam, 2.0, 0.0});
      hypo.record(std::abs(lam - 1.0 + 1.0 / (1.0 + b2) + 1.0 / ((1.0 + beta) * (1.0 + beta))));
    }
  }
  std::vector<CheckResult> out;
  for (auto* c : {&strong_lip_coco, &nonexp, &strong_res, &strong_coco, &strong_lip,
                  &strong_lip_alt, &strong_avg, &expansion, &id_minus, &res_strong, &hypo}) {
    out.push_back(std::move(*c).done());
  }
  return out;
}

/// Sampled resolvent inequalities for monotone Lipschitz linear operators.
inline std::vector<CheckResult> check_lipschitz_inequalities(const VerifyOptions& o,
                                                             std::mt19937_64& rng) {
  const double tol = o.sample_tol;
  detail::MarginCheck i1("sample.resolvent_expansion", tol);
  detail::MarginCheck i2("sample.identity_minus_resolvent_contraction", tol);
  detail::MarginCheck i3("sample.resolvent_strong_monotone", tol);
  detail::MarginCheck i4("sample.reflected_hypomonotone", tol);
  detail::MarginCheck fne("sample.resolvent_firmly_nonexpansive", tol);
  for (int k = 0; k < o.operators; ++k) {
    const Index n = std::uniform_int_distribution<Index>(2, o.max_dim)(rng);
    const double beta = random::log_uniform(0.1, 10.0, rng);
    const Matrix m = random::monotone_lipschitz(n, beta, rng, random::uniform(0.0, 0.5, rng));
    const double b = operator_norm(m);
    const OperatorSpec op(DenseLinear{m}, {Monotone{}, Lipschitz{b}});
    const double contraction = b / std::sqrt(1.0 + b * b);
    const double c3 = 1.0 / (2.0 * (1.0 + b) * (1.0 + b)) + 1.0 / (2.0 * (1.0 + b * b));
    const double lam = lambda_hypo(b);
    for (int s = 0; s < o.pairs; ++s) {
      const Vector x = standard_normal(n, rng);
      const Vector y = standard_normal(n, rng);
      const Vector d = x - y;
      const Vector jd = op.resolvent(x) - op.resolvent(y);
      const Vector rd = 2.0 * jd - d;
      i1.record((1.0 + b) * jd.norm() - d.norm());
      i2.record(contraction * d.norm() - (d - jd).norm());
      i3.record(d.dot(jd) - c3 * d.squaredNorm());
      i4.record(d.dot(rd) + lam * d.squaredNorm());
      fne.record(d.dot(jd) - jd.squaredNorm());
    }
  }
  return {std::move(i1).done(), std::move(i2).done(), std::move(i3).done(), std::move(i4).done(),
          std::move(fne).done()};
}

/// Sampled inequalities for skew linear operators.
inline std::vector<CheckResult> check_skew_inequalities(const VerifyOptions& o,
                                                        std::mt19937_64& rng) {
  const double tol = o.sample_tol;
  detail::MarginCheck iso("sample.skew_reflected_isometry", 1e-10);
  detail::MarginCheck s2("sample.skew_resolvent_norm_bound", tol);
  detail::MarginCheck s3("sample.skew_resolvent_strong_monotone", tol);
  detail::MarginCheck s4("sample.skew_reflected_inner_bound", tol);
  for (int k = 0; k < o.operators; ++k) {
    // Alternate between dense skew matrices and the block operator built from L.
    OperatorSpec op = [&] {
      if (k % 2 == 0) {
        const Index n = std::uniform_int_distribution<Index>(2, o.max_dim)(rng);
        const Matrix s = random::skew(n, random::log_uniform(0.1, 10.0, rng), rng);
        return OperatorSpec(DenseLinear{s}, {Monotone{}});
      }
      const Index rows = std::uniform_int_distribution<Index>(1, o.max_dim / 2)(rng);
      const Index cols = std::uniform_int_distribution<Index>(1, o.max_dim / 2)(rng);
      return OperatorSpec(SkewFromL{random::gaussian(rows, cols, rng)}, {Monotone{}});
    }();
    double b = 0.0;
    if (const auto* dl = std::get_if<DenseLinear>(&op.kind())) {
      b = operator_norm(dl->matrix);
    } else {
      b = operator_norm(std::get<SkewFromL>(op.kind()).L);
    }
    const double b2 = b * b;
    for (int s = 0; s < o.pairs; ++s) {
      const Vector x = standard_normal(op.dim(), rng);
      const Vector jx = op.resolvent(x);
      const Vector rx = 2.0 * jx - x;
      const double x2 = x.squaredNorm();
      iso.record(-std::abs(rx.norm() - x.norm()));
      s2.record((1.0 + b2) * jx.squaredNorm() - x2);
      s3.record(x.dot(jx) - x2 / (b2 + 1.0));
      s4.record(x.dot(rx) - (2.0 / (1.0 + b2) - 1.0) * x2);
    }
  }
  return {std::move(iso).done(), std::move(s2).done(), std::move(s3).done(), std::move(s4).done()};
}

/// Rotation A with B = N_{0}: -R_B R_A = -A, and -A is not averaged for any alpha.
inline std::vector<CheckResult> check_rotation_not_averaged() {
  detail::IdentityCheck comp("example.rotation_zero_cone_composition", 0.0 + 1e-300);
  detail::MarginCheck avg("example.rotation_zero_cone_not_averaged", 0.0);
  const OperatorSpec a = make_rotation2(1.0, {Monotone{}, Lipschitz{1.0}});
  const OperatorSpec b = make_zero_cone(2);
  Eigen::Matrix2d neg_rbra;
  for (int j = 0; j < 2; ++j) {
    Vector e = Vector::Zero(2);
    e[j] = 1.0;
    neg_rbra.col(j) = -b.reflected_resolvent(a.reflected_resolvent(e));
  }
  Eigen::Matrix2d rot;
  rot << 0.0, 1.0, -1.0, 0.0;
  comp.record((neg_rbra - (-rot)).cwiseAbs().maxCoeff());
  for (int i = 1; i <= 99; ++i) {
    const double alpha = i / 100.0;
    // -R_B R_A = (1-alpha) Id + alpha N would need ||N|| <= 1.
    const Eigen::Matrix2d n = (neg_rbra - (1.0 - alpha) * Eigen::Matrix2d::Identity()) / alpha;
    const double norm = spectral_norm_2x2(n);
    const double expected = std::sqrt(1.0 + (1.0 - alpha) * (1.0 - alpha)) / alpha;
    // Margin: positive when N is expansive (averagedness refuted) and matches the closed form.
    avg.record(std::abs(norm - expected) <= 1e-12 ? norm - 1.0 : -1.0);
  }
  return {std::move(comp).done(), std::move(avg).done()};
}

/// Sharp example: the rate formula equals the spectral norm of the explicit 2x2 DR
/// map, and the map built from the operators matches the explicit matrix.
inline std::vector<CheckResult> check_sharp_example(const VerifyOptions& o, std::mt19937_64& rng) {
  detail::IdentityCheck sharp("example.sharp_rate_equals_norm", o.identity_tol);
  detail::IdentityCheck built("example.sharp_matrix_from_operators", 1e-12);
  for (int k = 0; k < o.param_draws; ++k) {
    const double beta = random::log_uniform(0.1, 10.0, rng);
    const double mu = random::log_uniform(0.1, 10.0, rng);
    sharp.record(std::abs(rate_skew_strong(beta, mu).value - spectral_norm_T_sharp(beta, mu)));

    const OperatorSpec a = make_rotation2(beta, {Monotone{}, Lipschitz{beta}});
    Matrix basis(2, 1);
    basis << 0.0, 1.0;
    const OperatorSpec b(ScaledIdPlusNormalConeSubspace{mu, basis}, {StronglyMonotone{mu}});
    DRConfig cfg;
    Eigen::Matrix2d t;
    for (int j = 0; j < 2; ++j) {
      Vector e = Vector::Zero(2);
      e[j] = 1.0;
      t.col(j) = dr_step(a, b, e, cfg);
    }
    built.record((t - sharp_example_matrix(beta, mu)).cwiseAbs().maxCoeff());
  }
  return {std::move(sharp).done(), std::move(built).done()};
}

inline std::vector<CheckResult> run_verify_suite(const VerifyOptions& o = {}) {
  std::mt19937_64 rng(o.seed);
  std::vector<CheckResult> all;
  auto append = [&](std::vector<CheckResult> part) {
    for (auto& r : part) {
      all.push_back(std::move(r));
    }
  };
  append(check_property_rows(o, rng));
  append(check_conic_identities(o, rng));
  append(check_lipschitz_inequalities(o, rng));
  append(check_skew_inequalities(o, rng));
  append(check_rotation_not_averaged());
  append(check_sharp_example(o, rng));
  return all;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

}  // namespace drs::verify
