#pragma once

#include <cstdint>

namespace selgen {

// Observed loss count k out of n calibration trials, bounded at confidence
// level delta. k <= n is a hard contract.
struct BoundQuery {
  std::int64_t k = 0;
  std::int64_t n = 0;
  double delta = 0.0;
};

// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
// https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function
double reg_inc_beta(double x, double a, double b);

// Beta(a, b) CDF at x; thin wrapper over reg_inc_beta.
double beta_cdf(double x, double a, double b);

// Binomial CDF F(k; n, theta) = sum_{i<=k} C(n,i) theta^i (1-theta)^(n-i),
// evaluated through the incomplete-beta identity
// F(k; n, theta) = I_{1-theta}(n-k, k+1).
double binom_cdf(std::int64_t k, std::int64_t n, double theta);

// Exact upper binomial tail bound:
//   U(k; n, delta) = inf{ theta in [0,1] | F(k; n, theta) <= delta } or 1
// when the set is empty (always when k = n, and by convention when n = 0).
// Bisection to 1e-12 bracket width; ties resolve upward (conservative).
double u_binom(const BoundQuery& q);
double u_binom(std::int64_t k, std::int64_t n, double delta);

// Exact lower binomial tail bound (Clopper-Pearson style):
//   L(k; n, delta) = sup{ theta in [0,1] | 1 - F(k-1; n, theta) <= delta } or 0
// when k = 0 or n = 0. Satisfies P{ R >= L(K; n, delta) } >= 1 - delta for
// K ~ Binom(n, R). Ties resolve downward (conservative).
double l_binom(const BoundQuery& q);
double l_binom(std::int64_t k, std::int64_t n, double delta);

}  // namespace selgen
