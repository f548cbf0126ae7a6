// Sharp two-dimensional example: a rotation by beta against mu Id + N_V, with V the
// second coordinate axis. The DR map is linear and its norm equals the skew rate.

#include "drsplit/drsplit.hpp"

#include <cstdio>

int main() {
  using namespace drs;
  std::printf("%6s %6s %12s %12s %12s %8s\n", "beta", "mu", "skew_rate", "||T||", "r_emp", "iters");
  for (double beta : {0.5, 1.0, 3.0}) {
    for (double mu : {0.2, 1.0, 4.0}) {
      const OperatorSpec a = make_rotation2(beta, {Monotone{}, Lipschitz{beta}});
      Matrix basis(2, 1);
      basis << 0.0, 1.0;
      const OperatorSpec b(ScaledIdPlusNormalConeSubspace{mu, basis}, {StronglyMonotone{mu}});

      DRConfig cfg;
      cfg.x0 = Vector::Ones(2);
      cfg.tol = 1e-13;
      const RunResult res = run(a, b, cfg);
      const RateFit fit = estimate_rate(res.trace);
      std::printf("%6.2f %6.2f %12.8f %12.8f %12.8f %8d\n", beta, mu,
                  rate_skew_strong(beta, mu).value, spectral_norm_T_sharp(beta, mu), fit.r_emp,
                  res.trace.iterations_used);
    }
  }

  const GammaSweepResult g = optimal_gamma(1.0, 1.0);
  std::printf("\nbeta = mu = 1: gamma* = %.7f, rate %.6f (rate at gamma = 1: %.6f)\n", g.gamma_star,
              g.rate_at_star, rate_skew_strong(1.0, 1.0).value);
  return 0;
}
