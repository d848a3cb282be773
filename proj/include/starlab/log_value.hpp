#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace starlab {

/// A nonnegative quantity stored as its natural logarithm.
///
/// Exact zero is the distinguished value -inf. Probabilities, pmfs and the
/// likelihood ratio all travel in this form because they routinely span
/// hundreds of orders of magnitude.
class LogValue {
 public:
  constexpr LogValue() = default;
  constexpr explicit LogValue(double log) : log_(log) {}

  static constexpr LogValue zero() { return LogValue{}; }
  static constexpr LogValue one() { return LogValue{0.0}; }
  static LogValue from_linear(double x) { return LogValue{x > 0.0 ? std::log(x) : kNegInf}; }

  constexpr double log() const { return log_; }
  double linear() const { return std::exp(log_); }
  constexpr bool is_zero() const { return log_ == kNegInf; }

  friend constexpr bool operator==(LogValue, LogValue) = default;
  friend constexpr auto operator<=>(LogValue a, LogValue b) { return a.log_ <=> b.log_; }

  friend LogValue operator*(LogValue a, LogValue b) { return LogValue{a.log_ + b.log_}; }
  friend LogValue operator/(LogValue a, LogValue b) { return LogValue{a.log_ - b.log_}; }
  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.log_, b.log_);
    const double lo = std::min(a.log_, b.log_);
    return LogValue{hi + std::log1p(std::exp(lo - hi))};
  }
  LogValue& operator+=(LogValue other) { return *this = *this + other; }

 private:
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double log_ = kNegInf;
};

/// log(sum(exp(xs))) with the usual max shift; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// One-pass log-sum-exp accumulator. Rescales whenever a new maximum arrives.
class LogSumExpAccumulator {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  /// Adds weight * exp(x) for a positive integer weight.
  void add_weighted(double x, double weight) { add(x + std::log(weight)); }
  double result() const {
    return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace starlab
