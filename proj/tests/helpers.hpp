#ifndef DTMI_TESTS_HELPERS_HPP_
#define DTMI_TESTS_HELPERS_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "dtmi/core.hpp"
#include "dtmi/rng.hpp"

namespace dtmi::testing {

// --- independent oracles -------------------------------------------------

// Reference digamma, deliberately on a different path from the library:
// long-double recurrence up to x >= 24 and Bernoulli terms through x^-16.
inline long double digamma_oracle(long double x) {
  long double result = 0.0L;
  while (x < 24.0L) {
    result -= 1.0L / x;
    x += 1.0L;
  }
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  static const long double coef[8] = {
      1.0L / 12.0L,    -1.0L / 120.0L,     1.0L / 252.0L,  -1.0L / 240.0L,
      1.0L / 132.0L,   -691.0L / 32760.0L, 1.0L / 12.0L,   -3617.0L / 8160.0L,
  };
  long double series = 0.0L;
  long double power = inv2;
  for (long double c : coef) {
    series += c * power;
    power *= inv2;
  }
  return result + std::log(x) - 0.5L * inv - series;
}

// Smallest root of p*log2(m) + H(p) = target by coarse scan plus bisection;
// written independently of bounds::fano_lower_tight.
inline double fano_root_oracle(double target, int m) {
  const double log2m = std::log2(static_cast<double>(m));
  auto f = [&](double p) {
    double h = 0.0;
    if (p > 0.0 && p < 1.0) {
      h = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
    }
    return p * log2m + h;
  };
  if (target <= 0.0) return 0.0;
  const double top = static_cast<double>(m) / (m + 1.0);
  double lo = 0.0;
  double hi = top;
  const int kScan = 4096;
  for (int i = 1; i <= kScan; ++i) {
    const double p = top * i / kScan;
    if (f(p) >= target) {
      hi = p;
      lo = top * (i - 1) / kScan;
      break;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// log of the binomial pmf, used by the exact typicality-error oracle.
inline double log_binom_pmf(int n, int k, double p) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

// Exact error probability of the typicality decoder on a BSC(p) repetition
// pair (m = 2, complementary codewords): a y with k flips is typical for the
// true candidate iff |k d/n - c| < eps with d = log2((1-p)/p) and
// c = H(p) + log2(1-p); the false candidate sees n-k flips.
inline double typicality_repetition_error_oracle(int n, double p, double eps) {
  const double d = std::log2((1.0 - p) / p);
  const double h = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  const double c = h + std::log2(1.0 - p);
  auto member = [&](int flips) {
    return std::abs(flips * d / n - c) < eps;
  };
  double correct = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (member(k) && !member(n - k)) correct += std::exp(log_binom_pmf(n, k, p));
  }
  return 1.0 - correct;
}

// --- generators & small stats --------------------------------------------

inline PairedSamples correlated_gaussian(std::size_t n, double rho, RngSeed seed) {
  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), 1), y(static_cast<Eigen::Index>(n), 1);
  const double s = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal();
    const double b = rng.normal();
    x(static_cast<Eigen::Index>(i), 0) = a;
    y(static_cast<Eigen::Index>(i), 0) = rho * a + s * b;
  }
  return PairedSamples(std::move(x), std::move(y));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace dtmi::testing

#endif  // DTMI_TESTS_HELPERS_HPP_
