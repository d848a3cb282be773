#include "starlab/special.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>

namespace starlab::special {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_gamma(double x) {
  int sign = 0;
  // lgamma_r leaves the global signgam alone, so concurrent callers are safe.
  return ::lgamma_r(x, &sign);
}

// Loader (2000), "Fast and accurate computation of binomial probabilities".
double stirlerr(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    int sign = 0;
    const long double ln = static_cast<long double>(n);
    const long double value = ::lgammal_r(ln + 1.0L, &sign) - (ln + 0.5L) * std::log(ln) + ln -
                              0.918938533204672741780329736406L;  // log sqrt(2 pi)
    return static_cast<double>(value);
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    if (std::fabs(s) < std::numeric_limits<double>::min()) return s;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

double log_binomial_pmf(double x, double n, double p, double q) {
  if (p == 0) return x == 0 ? 0.0 : kNegInf;
  if (q == 0) return x == n ? 0.0 : kNegInf;
  if (x < 0 || x > n) return kNegInf;
  if (x == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) return q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = std::log(2 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

double log_choose(int64_t n, int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  if (k == 0 || k == n) return 0.0;
  k = std::min(k, n - k);
  // log n! = stirlerr(n) + log sqrt(2 pi n) + n log n - n, with the large
  // n log n terms combined analytically so nothing cancels.
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  const double rest = nd - kd;
  return stirlerr(nd) - stirlerr(kd) - stirlerr(rest) +
         0.5 * std::log(nd / (2 * std::numbers::pi * kd * rest)) + kd * std::log(nd / kd) -
         rest * std::log1p(-kd / nd);
}

double log_falling(int64_t a, int64_t k) {
  if (k == 0) return 0.0;
  if (a < k) return kNegInf;
  if (k <= 4096) {
    double acc = 0.0;
    for (int64_t j = 0; j < k; ++j) acc += std::log(static_cast<double>(a - j));
    return acc;
  }
  return log_gamma(static_cast<double>(a) + 1.0) - log_gamma(static_cast<double>(a - k) + 1.0);
}

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace starlab::special
