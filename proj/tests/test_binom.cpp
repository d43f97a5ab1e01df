#include "selgen/binom.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "selgen/rng.hpp"

using namespace selgen;

namespace {

// Independent oracle: direct log-space summation of the binomial pmf,
// no incomplete-beta machinery.
double oracle_cdf(std::int64_t k, std::int64_t n, double theta) {
  if (theta <= 0.0) return 1.0;
  if (theta >= 1.0) return k >= n ? 1.0 : 0.0;
  double sum = 0.0;
  for (std::int64_t i = 0; i <= k; ++i) {
    const double logp = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                        std::lgamma(n - i + 1.0) + i * std::log(theta) +
                        (n - i) * std::log1p(-theta);
    sum += std::exp(logp);
  }
  return std::min(sum, 1.0);
}

double oracle_u(std::int64_t k, std::int64_t n, double delta) {
  if (n == 0 || k == n) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle_cdf(k, n, mid) <= delta ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

TEST_SUITE("binom") {

TEST_CASE("cdf trivial and closed-form values") {
  CHECK(binom_cdf(5, 5, 0.3) == 1.0);
  CHECK(binom_cdf(1, 3, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  // (1-theta)^n closed form
  CHECK(binom_cdf(0, 10, 0.2) ==
        doctest::Approx(0.1073741824).epsilon(1e-12));
  CHECK(binom_cdf(0, 0, 0.7) == 1.0);
  CHECK_THROWS_AS(binom_cdf(6, 5, 0.3), std::invalid_argument);
}

TEST_CASE("cdf matches the log-space oracle") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::int64_t n : {1, 2, 3, 7, 10, 64, 257, 1000}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto k = static_cast<std::int64_t>(gen() % (n + 1));
      const double theta = unif(gen);
      const double got = binom_cdf(k, n, theta);
      const double want = oracle_cdf(k, n, theta);
      CHECK(std::fabs(got - want) <= 5e-12);
    }
  }
}

TEST_CASE("cdf complement symmetry at large n") {
  // F(k; n, theta) + F(n-k-1; n, 1-theta) = 1 exactly in real arithmetic.
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  for (int rep = 0; rep < 40; ++rep) {
    const std::int64_t n = 1000000;
    const auto k = static_cast<std::int64_t>(gen() % (n + 1));
    const double theta = unif(gen);
    if (k == n) continue;
    const double a = binom_cdf(k, n, theta);
    const double b = binom_cdf(n - k - 1, n, 1.0 - theta);
    CHECK(std::fabs(a + b - 1.0) <= 1e-11);
  }
}

TEST_CASE("cdf closed forms at n = 1e6") {
  const std::int64_t n = 1000000;
  const double theta = 1e-5;
  CHECK(std::fabs(binom_cdf(0, n, theta) - std::exp(n * std::log1p(-theta))) <=
        1e-12);
  const double theta2 = 0.99999;
  // F(n-1; n, theta) = 1 - theta^n
  CHECK(std::fabs(binom_cdf(n - 1, n, theta2) -
                  (1.0 - std::exp(n * std::log(theta2)))) <= 1e-12);
}

TEST_CASE("u_binom spec values") {
  CHECK(u_binom(10, 10, 0.05) == 1.0);
  CHECK(u_binom(0, 10, 0.05) ==
        doctest::Approx(1.0 - std::pow(0.05, 0.1)).epsilon(1e-9));
  CHECK(u_binom(1, 10, 0.05) ==
        doctest::Approx(0.39416330243650466).epsilon(1e-8));
  CHECK(u_binom(0, 0, 0.5) == 1.0);  // vacuous-data convention
}

TEST_CASE("l_binom spec values") {
  CHECK(l_binom(0, 10, 0.05) == 0.0);
  CHECK(l_binom(10, 10, 0.05) ==
        doctest::Approx(std::pow(0.05, 0.1)).epsilon(1e-9));
  CHECK(l_binom(1, 10, 0.05) ==
        doctest::Approx(1.0 - std::pow(0.95, 0.1)).epsilon(1e-7));
  CHECK(l_binom(0, 0, 0.5) == 0.0);  // vacuous-data convention
  CHECK_THROWS_AS(l_binom(5, 0, 0.5), std::invalid_argument);
}

TEST_CASE("bounds match the bisection oracle on random queries") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> unif(0.001, 0.999);
  for (int rep = 0; rep < 200; ++rep) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 300);
    const auto k = static_cast<std::int64_t>(gen() % (n + 1));
    const double delta = unif(gen);
    CHECK(std::fabs(u_binom(k, n, delta) - oracle_u(k, n, delta)) <= 1e-9);
  }
}

TEST_CASE("coverage and minimality") {
  for (std::int64_t n : {1, 5, 37, 200}) {
    for (std::int64_t k = 0; k <= n; k += std::max<std::int64_t>(1, n / 7)) {
      for (double delta : {0.3, 0.05, 0.01}) {
        const double u = u_binom(k, n, delta);
        if (k == n) {
          CHECK(u == 1.0);  // empty feasible set, vacuous bound
        } else {
          CHECK(binom_cdf(k, n, u) <= delta + 1e-8);
          CHECK(binom_cdf(k, n, std::max(u - 1e-6, 0.0)) > delta);
        }
        const double l = l_binom(k, n, delta);
        if (l > 0.0) {
          CHECK(1.0 - binom_cdf(k - 1, n, l) <= delta + 1e-8);
        }
        CHECK(l <= u);
        if (k > 0 && k < n) {
          const double ratio = static_cast<double>(k) / static_cast<double>(n);
          CHECK(l <= ratio);
          CHECK(u >= ratio);
        }
      }
    }
  }
}

TEST_CASE("monotonicity in k and delta") {
  const std::int64_t n = 50;
  double prev = -1.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    const double u = u_binom(k, n, 0.05);
    CHECK(u >= prev - 1e-12);
    prev = u;
    if (k > 0) {
      CHECK(l_binom(k, n, 0.05) >= l_binom(k - 1, n, 0.05) - 1e-12);
    }
  }
  // non-increasing in delta
  CHECK(u_binom(5, n, 0.01) >= u_binom(5, n, 0.1) - 1e-12);
  // non-increasing in n at fixed k
  CHECK(u_binom(5, 20, 0.05) >= u_binom(5, 40, 0.05) - 1e-12);
}

TEST_CASE("upper-bound coverage audit, binomial draws") {
  // theta* > u_binom(K, n, delta) should happen with frequency <= delta.
  const double theta_star = 0.3;
  const std::int64_t n = 60;
  const double delta = 0.1;
  const int trials = 100000;
  Rng rng(91);
  std::vector<double> bound(n + 1, -1.0);
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (rng.bernoulli(theta_star)) ++k;
    }
    if (bound[k] < 0.0) bound[k] = u_binom(k, n, delta);
    if (theta_star > bound[k]) ++violations;
  }
  const double sigma = std::sqrt(trials * delta * (1.0 - delta));
  CHECK(violations <= trials * delta + 3.0 * sigma);
}

TEST_CASE("reg_inc_beta basics") {
  CHECK(reg_inc_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(reg_inc_beta(1.0, 2.0, 3.0) == 1.0);
  // I_x(1,1) = x
  CHECK(reg_inc_beta(0.37, 1.0, 1.0) == doctest::Approx(0.37).epsilon(1e-13));
  // I_x(1,b) = 1-(1-x)^b
  CHECK(reg_inc_beta(0.2, 1.0, 5.0) ==
        doctest::Approx(1.0 - std::pow(0.8, 5.0)).epsilon(1e-13));
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0.0, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
