#include "selgen/binom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selgen {

namespace {

// Lanczos approximation of the gamma function, g = 7, 9 terms
// (Godfrey's coefficients). Used only through the ratio
// L(a+b) / (L(a) L(b)), which stays O(1).
// https://en.wikipedia.org/wiki/Lanczos_approximation
constexpr double kLanczosG = 7.0;
constexpr double kLanczosCoef[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7,
};

double lanczos_sum(double z) {
  double x = kLanczosCoef[0];
  for (int i = 1; i < 9; ++i) {
    x += kLanczosCoef[i] / (z - 1.0 + i);
  }
  return x;
}

// x^a * y^b / B(a, b) with y = 1 - x, computed in the grouped form
//   C * sqrt(ag*bg/cg) * (x*cg/ag)^a * (y*cg/bg)^b
// where ag = a+g-1/2 etc., so every pow base is O(1) near the binomial
// mean and no huge intermediate magnitudes appear. The base-minus-one
// terms are refined with fma so that a*log1p(u) keeps absolute accuracy
// even for a on the order of 1e6.
double ibeta_power_terms(double a, double b, double x, double y) {
  const double c = a + b;
  const double ag = a + kLanczosG - 0.5;
  const double bg = b + kLanczosG - 0.5;
  const double cg = c + kLanczosG - 0.5;

  const double lratio = lanczos_sum(c) / (lanczos_sum(a) * lanczos_sum(b));

  auto log_pow_term = [](double w, double num, double den, double exponent) {
    // exponent * log(w * num / den), with w*num split into hi+lo parts.
    double p = w * num;
    double p_lo = std::fma(w, num, -p);
    double u = (p - den) / den + p_lo / den;
    if (u > -0.5 && u < 1.0) {
      return exponent * std::log1p(u);
    }
    return exponent * std::log(w * num / den);
  };

  const double t = log_pow_term(x, cg, ag, a) + log_pow_term(y, cg, bg, b);
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  const double front =
      kInvSqrt2Pi * std::exp(kLanczosG - 0.5) * lratio * std::sqrt(ag * bg / cg);
  return front * std::exp(t);
}

// Continued fraction for the incomplete beta function, modified Lentz.
// Converges for x < (a+1)/(a+b+2); the caller flips via the symmetry
// I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
double ibeta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 20000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("reg_inc_beta: a and b must be positive");
  }
  if (std::isnan(x)) {
    throw std::invalid_argument("reg_inc_beta: x is NaN");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) {
    return 1.0 - reg_inc_beta(1.0 - x, b, a);
  }
  const double pre = ibeta_power_terms(a, b, x, 1.0 - x);
  if (pre == 0.0) return 0.0;
  return pre / a * ibeta_continued_fraction(x, a, b);
}

double beta_cdf(double x, double a, double b) { return reg_inc_beta(x, a, b); }

double binom_cdf(std::int64_t k, std::int64_t n, double theta) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("binom_cdf: need 0 <= k <= n, got k=" +
                                std::to_string(k) + " n=" + std::to_string(n));
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("binom_cdf: theta outside [0,1]");
  }
  if (k == n) return 1.0;
  if (theta <= 0.0) return 1.0;
  if (theta >= 1.0) return 0.0;
  return reg_inc_beta(1.0 - theta, static_cast<double>(n - k),
                      static_cast<double>(k + 1));
}

namespace {

void check_query(const BoundQuery& q, const char* who) {
  if (q.n < 0 || q.k < 0 || q.k > q.n) {
    throw std::invalid_argument(std::string(who) + ": need 0 <= k <= n");
  }
  if (!(q.delta > 0.0 && q.delta < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": delta outside (0,1)");
  }
}

constexpr int kBisectIters = 60;
constexpr double kBisectWidth = 1e-12;

}  // namespace

double u_binom(const BoundQuery& q) {
  check_query(q, "u_binom");
  if (q.n == 0 || q.k == q.n) return 1.0;
  // F(k; n, .) is continuous and strictly decreasing on (0,1) for k < n,
  // F(0) = 1 > delta and F(1) = 0 <= delta, so the bracket below is valid.
  double lo = 0.0;  // F(lo) > delta
  double hi = 1.0;  // F(hi) <= delta
  for (int it = 0; it < kBisectIters && hi - lo > kBisectWidth; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binom_cdf(q.k, q.n, mid) <= q.delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double u_binom(std::int64_t k, std::int64_t n, double delta) {
  return u_binom(BoundQuery{k, n, delta});
}

double l_binom(const BoundQuery& q) {
  check_query(q, "l_binom");
  if (q.n == 0 || q.k == 0) return 0.0;
  // G(theta) = P{X >= k} = 1 - F(k-1; n, theta) is continuous and strictly
  // increasing for k >= 1, G(0) = 0 <= delta and G(1) = 1 > delta.
  double lo = 0.0;  // G(lo) <= delta
  double hi = 1.0;  // G(hi) > delta
  for (int it = 0; it < kBisectIters && hi - lo > kBisectWidth; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - binom_cdf(q.k - 1, q.n, mid) <= q.delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double l_binom(std::int64_t k, std::int64_t n, double delta) {
  return l_binom(BoundQuery{k, n, delta});
}

}  // namespace selgen
