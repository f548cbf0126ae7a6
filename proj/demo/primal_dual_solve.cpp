// Random quadratic composite problem min 1/2 x'Px + q'x + g(Lx), g quadratic, solved
// on the product space and compared with the normal equations.

#include "drsplit/drsplit.hpp"

#include <cstdio>

int main() {
  using namespace drs;
  std::mt19937_64 rng(7);
  const Index n = 12;
  const Index m = 8;
  const Matrix p = random::symmetric_with_spectrum(n, 0.5, 2.0, rng);
  const Matrix s = random::symmetric_with_spectrum(m, 0.1, 1.5, rng);
  const Matrix l = random::gaussian(m, n, rng) / 3.0;
  const Vector q = random::gaussian(n, 1, rng);
  const Vector t = random::gaussian(m, 1, rng);
  const CompositeProblem prob(p, q, s, t, l);

  DRConfig cfg;
  cfg.tol = 1e-12;
  cfg.keep_history = false;
  const PDSolution sol = solve(prob, cfg);
  const RateFit fit = estimate_rate(sol.trace, 0.5, sol.fixed_point.norm());

  const Matrix h = p + l.transpose() * s * l;
  const Vector x_ref = h.ldlt().solve(-q - l.transpose() * t);

  std::printf("sigma %.4f  beta_g %.4f  ||L|| %.4f\n", prob.sigma(), prob.beta_g(), prob.norm_L());
  std::printf("iterations %d  kkt %.3e  gap %.3e\n", sol.trace.iterations_used, sol.kkt_residual,
              duality_gap(prob, sol.x_star, sol.y_star));
  std::printf("rate bound %.6f  fitted rate %.6f\n", sol.rate_bound, fit.r_emp);
  std::printf("max |x - x_ref| = %.3e\n", (sol.x_star - x_ref).cwiseAbs().maxCoeff());
  return 0;
}
