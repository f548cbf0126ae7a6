#include "drsplit/engine.hpp"
#include "drsplit/random.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace drs;

namespace {

Matrix axis2() {
  Matrix b(2, 1);
  b << 0.0, 1.0;
  return b;
}

OperatorSpec sharp_b(double mu) {
  return {ScaledIdPlusNormalConeSubspace{mu, axis2()}, {StronglyMonotone{mu}}};
}

/// Largest of ||T x - T y|| / ||x - y|| over random pairs.
double max_step_ratio(const OperatorSpec& a, const OperatorSpec& b, const DRConfig& cfg,
                      int pairs, std::mt19937_64& rng) {
  double worst = 0.0;
  for (int s = 0; s < pairs; ++s) {
    const Vector x = random::gaussian(a.dim(), 1, rng);
    const Vector y = random::gaussian(a.dim(), 1, rng);
    const double r = (dr_step(a, b, x, cfg) - dr_step(a, b, y, cfg)).norm() / (x - y).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

OperatorSpec strongly_monotone_quadratic(Index n, double mu, double hi, std::mt19937_64& rng) {
  return {QuadraticGradient{random::symmetric_with_spectrum(n, mu, hi, rng),
                            random::gaussian(n, 1, rng)},
          {StronglyMonotone{mu}, Lipschitz{hi * (1 + 1e-12)}}};
}

}  // namespace

TEST(DrStep, RotationAgainstZeroCone) {
  const OperatorSpec a = make_rotation2(1.0, {Monotone{}, Lipschitz{1.0}});
  const OperatorSpec b = make_zero_cone(2);
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const Vector x = random::gaussian(2, 1, rng);
    EXPECT_LT((dr_step(a, b, x, {}) - 0.5 * (x + rot * x)).norm(), 1e-15);
  }
}

TEST(DrStep, FixedPointIsFixed) {
  const OperatorSpec a = make_rotation2(2.0);
  const OperatorSpec b = sharp_b(0.5);
  const Vector x = Vector::Zero(2);
  EXPECT_EQ(dr_step(a, b, x, {}), x);
}

TEST(DrStep, SharpExampleAtUnitParameters) {
  const Vector t = dr_step(make_rotation2(1.0), sharp_b(1.0), Vector::Unit(2, 0), {});
  EXPECT_NEAR(t[0], 0.5, 1e-15);
  EXPECT_NEAR(t[1], 0.0, 1e-15);
}

TEST(DrStep, MatchesDenseOracleBothOrders) {
  std::mt19937_64 rng(3);
  const Matrix ma = random::monotone_lipschitz(4, 1.5, rng);
  const Matrix mb = random::symmetric_with_spectrum(4, 0.3, 2.0, rng);
  const OperatorSpec a(DenseLinear{ma}, {Monotone{}});
  const OperatorSpec b(DenseLinear{mb}, {StronglyMonotone{0.3}});
  for (Order order : {Order::B_after_A, Order::A_after_B}) {
    DRConfig cfg;
    cfg.order = order;
    cfg.gamma = 0.8;
    const Matrix t = order == Order::B_after_A ? oracle::dr_matrix(ma, mb, 0.8)
                                               : oracle::dr_matrix(mb, ma, 0.8);
    const Vector x = random::gaussian(4, 1, rng);
    EXPECT_LT((dr_step(a, b, x, cfg) - t * x).norm(), 1e-13);
  }
}

TEST(DrStep, DimensionMismatch) {
  EXPECT_THROW(dr_step(make_rotation2(1.0), make_zero_cone(3), Vector::Zero(2), {}),
               DimensionError);
}

TEST(Config, Validation) {
  DRConfig cfg;
  cfg.gamma = 0;
  EXPECT_THROW(cfg.check(), DomainError);
  cfg = {};
  cfg.tol = 0;
  EXPECT_THROW(cfg.check(), DomainError);
  cfg = {};
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.check(), DomainError);
}

TEST(Run, SharpExampleConvergesToOrigin) {
  DRConfig cfg;
  cfg.tol = 1e-12;
  cfg.x0 = Eigen::Vector2d(3.0, -1.0);
  const RunResult r = run(make_rotation2(1.0, {Monotone{}, Lipschitz{1.0}}), sharp_b(1.0), cfg);
  EXPECT_TRUE(r.trace.converged);
  EXPECT_LT(r.fixed_point.norm(), 1e-10);
  EXPECT_LT(r.shadow_point.norm(), 1e-10);
  ASSERT_TRUE(r.trace.guarantee.has_value());
  EXPECT_EQ(r.trace.guarantee->rate_case, RateCase::SkewStrong);
  const RateFit fit = estimate_rate(r.trace);
  EXPECT_LE(fit.r_emp, rate_skew_strong(1, 1).value + 0.01);
}

TEST(Run, ZeroOperatorAgainstQuadratic) {
  const Vector target = Eigen::Vector3d(1.0, -2.0, 0.5);
  const OperatorSpec a(DenseLinear{Matrix::Zero(3, 3)}, {Monotone{}});
  const OperatorSpec b(QuadraticGradient{Matrix::Identity(3, 3), -target}, {StronglyMonotone{1}});
  DRConfig cfg;
  cfg.tol = 1e-13;
  const RunResult r = run(a, b, cfg);
  EXPECT_TRUE(r.trace.converged);
  EXPECT_LT((r.shadow_point - target).norm(), 1e-11);
}

TEST(Run, StartAtFixedPoint) {
  DRConfig cfg;
  cfg.x0 = Vector::Zero(2);
  const RunResult r = run(make_rotation2(1.0), sharp_b(1.0), cfg);
  EXPECT_TRUE(r.trace.converged);
  EXPECT_EQ(r.trace.iterations_used, 1);
  EXPECT_EQ(r.trace.step_norms.front(), 0.0);
}

TEST(Run, NonConvergenceIsReported) {
  DRConfig cfg;
  cfg.x0 = Eigen::Vector2d(1.0, 1.0);
  cfg.max_iter = 3;
  cfg.tol = 1e-15;
  const RunResult r = run(make_rotation2(3.0), sharp_b(0.1), cfg);
  EXPECT_FALSE(r.trace.converged);
  EXPECT_EQ(r.trace.iterations_used, 3);
  EXPECT_EQ(r.trace.step_norms.size(), 3u);
  EXPECT_EQ(r.trace.iterates.size(), 4u);
}

TEST(Run, HistoryCanBeDropped) {
  DRConfig cfg;
  cfg.x0 = Eigen::Vector2d(1.0, 1.0);
  cfg.keep_history = false;
  const RunResult r = run(make_rotation2(1.0), sharp_b(1.0), cfg);
  EXPECT_TRUE(r.trace.iterates.empty());
  EXPECT_EQ(r.trace.step_norms.size(), static_cast<std::size_t>(r.trace.iterations_used));
}

TEST(Guarantee, SelectsApplicableCase) {
  std::mt19937_64 rng(4);
  const OperatorSpec skew_a = make_rotation2(2.0, {Monotone{}, Lipschitz{2.0}});
  const OperatorSpec quad_b = strongly_monotone_quadratic(2, 0.5, 1.0, rng);
  const auto g = applicable_guarantee(skew_a, quad_b, Order::B_after_A);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->rate_case, RateCase::SkewStrong);
  EXPECT_DOUBLE_EQ(g->value, rate_skew_strong(2.0, 0.5).value);

  const OperatorSpec mono = make_rotation2(2.0, {Monotone{}});
  EXPECT_FALSE(applicable_guarantee(mono, make_zero_cone(2), Order::B_after_A));

  // Non-linear A in the swapped order: only the classical cases can apply.
  const OperatorSpec affine_a(QuadraticGradient{Matrix::Identity(2, 2), Vector::Ones(2)},
                              {Monotone{}, Lipschitz{1.0}});
  EXPECT_FALSE(applicable_guarantee(affine_a, quad_b, Order::A_after_B).has_value() &&
               applicable_guarantee(affine_a, quad_b, Order::A_after_B)->rate_case ==
                   RateCase::LipStrong_main);
  EXPECT_TRUE(applicable_guarantee(affine_a, quad_b, Order::B_after_A));
}

TEST(EstimateRate, GeometricSequenceExact) {
  IterationTrace tr;
  for (int i = 0; i < 40; ++i) {
    tr.step_norms.push_back(std::pow(0.7, i));
  }
  const RateFit f = estimate_rate(tr);
  EXPECT_NEAR(f.r_emp, 0.7, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-10);
  EXPECT_LE(f.window.second, 40);
  EXPECT_GE(f.window.first, 0);
}

TEST(EstimateRate, LinearMapWithKnownSpectralRadius) {
  // T = 1/2 (Id + R_B R_A) for commuting diagonal A, B with eigenvalues of T 0.5 and below.
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 3.0;
  b.diagonal() << 1.0, 0.5;
  const Matrix t = oracle::dr_matrix(a, b);
  const double rho = t.eigenvalues().cwiseAbs().maxCoeff();
  ASSERT_NEAR(rho, 0.5, 1e-12);
  DRConfig cfg;
  cfg.x0 = Eigen::Vector2d(1.0, 1.0);
  cfg.tol = 1e-14;
  const RunResult r = run(OperatorSpec(DenseLinear{a}, {StronglyMonotone{1.0}}),
                          OperatorSpec(DenseLinear{b}, {StronglyMonotone{0.5}}), cfg);
  EXPECT_NEAR(estimate_rate(r.trace).r_emp, 0.5, 0.01);
}

TEST(EstimateRate, Preconditions) {
  IterationTrace tr;
  tr.step_norms = {1, 0.5, 0.25};
  EXPECT_THROW(estimate_rate(tr), DomainError);
  tr.step_norms.assign(20, 0.0);
  EXPECT_THROW(estimate_rate(tr), DomainError);
  tr.step_norms.assign(20, 1.0);
  EXPECT_THROW(estimate_rate(tr, 0.0), DomainError);
}

// ---------------------------------------------------------------------------
// Contraction certificates

TEST(Contraction, ClassicalCases) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const Index n = std::uniform_int_distribution<Index>(2, 6)(rng);
    const double mu = random::log_uniform(0.1, 2.0, rng);
    const double beta = mu * random::log_uniform(1.0, 5.0, rng);
    DRConfig cfg;

    // (a) A (1/beta)-cocoercive, B mu-strongly monotone.
    const OperatorSpec coco(DenseLinear{random::symmetric_with_spectrum(n, 0.0, beta, rng)},
                            {Cocoercive{1.0 / beta}});
    const OperatorSpec strong = strongly_monotone_quadratic(n, mu, 3.0, rng);
    EXPECT_LE(max_step_ratio(coco, strong, cfg, 500, rng), rate_case_a(mu, beta).value + 1e-8);

    // (b) A cocoercive and strongly monotone, B monotone.
    const OperatorSpec both(DenseLinear{random::symmetric_with_spectrum(n, mu, beta, rng)},
                            {Cocoercive{1.0 / beta}, StronglyMonotone{mu}});
    const OperatorSpec mono(DenseLinear{random::skew(n, 1.0, rng)}, {Monotone{}});
    EXPECT_LE(max_step_ratio(both, mono, cfg, 500, rng), rate_case_b(mu, beta).value + 1e-8);

    // (c) A Lipschitz and strongly monotone, B monotone.
    const Matrix lip_strong =
        mu * Matrix::Identity(n, n) + random::skew(n, std::sqrt(beta * beta - mu * mu), rng);
    const OperatorSpec ls(DenseLinear{lip_strong},
                          {Lipschitz{beta * (1 + 1e-12)}, StronglyMonotone{mu}});
    EXPECT_LE(max_step_ratio(ls, mono, cfg, 500, rng), rate_case_c(mu, beta).value + 1e-8);
  }
}

TEST(Contraction, LipschitzMonotoneAgainstStronglyMonotone) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const Index n = std::uniform_int_distribution<Index>(2, 10)(rng);
    const double beta = random::log_uniform(0.1, 10, rng);
    const double mu = random::log_uniform(0.05, 5, rng);
    const OperatorSpec a(DenseLinear{random::monotone_lipschitz(n, beta, rng)},
                         {Monotone{}, Lipschitz{beta * (1 + 1e-12)}});
    const OperatorSpec b = strongly_monotone_quadratic(n, mu, mu * 4, rng);
    for (Order order : {Order::B_after_A, Order::A_after_B}) {
      DRConfig cfg;
      cfg.order = order;
      const double bound = rate_lip_strong(beta, mu).value;
      EXPECT_LE(max_step_ratio(a, b, cfg, 500, rng), bound + 1e-8);
      const auto g = applicable_guarantee(a, b, order);
      ASSERT_TRUE(g);
      EXPECT_LE(g->value, bound + 1e-12);
    }
  }
}

TEST(Contraction, SkewAgainstStronglyMonotoneWithStepLength) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    const Index n = 2 * std::uniform_int_distribution<Index>(1, 5)(rng);
    const double beta = random::log_uniform(0.1, 10, rng);
    const double mu = random::log_uniform(0.05, 5, rng);
    const double gamma = random::log_uniform(0.2, 5, rng);
    const Matrix s = random::skew(n, beta, rng);
    const OperatorSpec a(DenseLinear{s}, {Monotone{}, Lipschitz{beta * (1 + 1e-12)}});
    const OperatorSpec b = strongly_monotone_quadratic(n, mu, mu * 3, rng);
    DRConfig cfg;
    cfg.gamma = gamma;
    EXPECT_LE(max_step_ratio(a, b, cfg, 500, rng),
              rate_skew_strong(beta, mu, gamma).value + 1e-8);
  }
}

TEST(Contraction, AveragedCompositionBoundsStep) {
  // Case (a): -R_B R_A is alpha-averaged and T has factor alpha.
  std::mt19937_64 rng(10);
  for (int k = 0; k < 5; ++k) {
    const Index n = 4;
    const double mu = random::log_uniform(0.1, 1.0, rng);
    const double beta = mu * random::log_uniform(1.0, 4.0, rng);
    const Matrix ma = random::symmetric_with_spectrum(n, 0.0, beta, rng);
    const Matrix mb = random::symmetric_with_spectrum(n, mu, 2.0, rng);
    const Matrix id = Matrix::Identity(n, n);
    const Matrix ra = 2.0 * (id + ma).inverse() - id;
    const Matrix rb = 2.0 * (id + mb).inverse() - id;
    const double alpha = rate_case_a(mu, beta).value;
    const Matrix nmap = (-rb * ra - (1 - alpha) * id) / alpha;
    EXPECT_LE(oracle::svd_norm(nmap), 1.0 + 1e-8);
    EXPECT_LE(oracle::svd_norm(0.5 * (id + rb * ra)), alpha + 1e-8);
  }
}

TEST(Sharpness, SampledRatioAttainsNorm) {
  std::mt19937_64 rng(11);
  for (auto [beta, mu] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.3, 4.0}}) {
    const OperatorSpec a = make_rotation2(beta, {Monotone{}, Lipschitz{beta}});
    const OperatorSpec b = sharp_b(mu);
    DRConfig cfg;
    double worst = max_step_ratio(a, b, cfg, 500, rng);
    const Matrix t = sharp_example_matrix(beta, mu);
    const Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullV);
    const Vector v = svd.matrixV().col(0);
    worst = std::max(worst, dr_step(a, b, v, cfg).norm() / v.norm());
    EXPECT_NEAR(worst, spectral_norm_T_sharp(beta, mu), 1e-6);
  }
}

TEST(Invariants, StepNormsNonIncreasingUnderGuarantee) {
  std::mt19937_64 rng(12);
  const OperatorSpec a(DenseLinear{random::monotone_lipschitz(6, 2.0, rng)},
                       {Monotone{}, Lipschitz{2.0 * (1 + 1e-12)}});
  const OperatorSpec b = strongly_monotone_quadratic(6, 0.5, 2.0, rng);
  DRConfig cfg;
  cfg.x0 = random::gaussian(6, 1, rng);
  const RunResult r = run(a, b, cfg);
  ASSERT_TRUE(r.trace.guarantee);
  for (std::size_t i = 2; i < r.trace.step_norms.size(); ++i) {
    EXPECT_LE(r.trace.step_norms[i], r.trace.step_norms[i - 1] * (1 + 1e-9) + 1e-300);
  }
}

TEST(Invariants, ShadowSolvesInclusion) {
  std::mt19937_64 rng(13);
  for (Order order : {Order::B_after_A, Order::A_after_B}) {
    const Matrix ma = random::monotone_lipschitz(5, 1.0, rng);
    const Matrix q = random::symmetric_with_spectrum(5, 1.0, 2.0, rng);
    const Vector c = random::gaussian(5, 1, rng);
    const OperatorSpec a(DenseLinear{ma}, {Monotone{}});
    const OperatorSpec b(QuadraticGradient{q, c}, {StronglyMonotone{1.0}});
    DRConfig cfg;
    cfg.order = order;
    cfg.gamma = 0.7;
    cfg.tol = 1e-11;
    const RunResult r = run(a, b, cfg);
    ASSERT_TRUE(r.trace.converged);
    const Vector z = r.shadow_point;
    EXPECT_LE((cfg.gamma * (ma * z + q * z + c)).norm(), 10 * cfg.tol);
  }
}

TEST(Invariants, BothOrdersShareTheZero) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 5; ++k) {
    const Matrix s = random::skew(6, random::log_uniform(0.2, 3, rng), rng);
    const OperatorSpec a(DenseLinear{s}, {Monotone{}});
    const OperatorSpec b = strongly_monotone_quadratic(6, 1.0, 2.0, rng);
    DRConfig cfg;
    cfg.tol = 1e-10;
    const RunResult r1 = run(a, b, cfg);
    cfg.order = Order::A_after_B;
    const RunResult r2 = run(a, b, cfg);
    ASSERT_TRUE(r1.trace.converged && r2.trace.converged);
    EXPECT_LE((r1.shadow_point - r2.shadow_point).norm(), 10 * cfg.tol);
  }
}
