#include "starlab/hypergeom.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "starlab/errors.hpp"
#include "starlab/special.hpp"

namespace starlab::hypergeom {

namespace {

using BigInt = boost::multiprecision::cpp_int;
using Poly = std::vector<BigInt>;  // coefficients, lowest degree first

constexpr int64_t kMaxExactSupport = 1'000'000;
constexpr int kMaxPgfDegree = 64;

// P(x + 1) / P(x)
double up_ratio(const Params& p, int64_t x) {
  const double K = static_cast<double>(p.successes);
  const double n = static_cast<double>(p.draws);
  const double F = static_cast<double>(p.population - p.successes);
  const double xd = static_cast<double>(x);
  return (K - xd) * (n - xd) / ((xd + 1.0) * (F - n + xd + 1.0));
}

// P(x - 1) / P(x)
double down_ratio(const Params& p, int64_t x) {
  const double K = static_cast<double>(p.successes);
  const double n = static_cast<double>(p.draws);
  const double F = static_cast<double>(p.population - p.successes);
  const double xd = static_cast<double>(x);
  return xd * (F - n + xd) / ((K - xd + 1.0) * (n - xd + 1.0));
}

BigInt big_choose(int64_t n, int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt acc = 1;
  for (int64_t j = 1; j <= k; ++j) {
    acc *= n - k + j;
    acc /= j;
  }
  return acc;
}

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int sign_of(const BigInt& v) { return v.sign(); }

void make_primitive(Poly& p) {
  BigInt g = 0;
  for (const auto& c : p) g = gcd(g, abs(c));
  if (g > 1) {
    for (auto& c : p) c /= g;
  }
}

Poly derivative(const Poly& p) {
  Poly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<int64_t>(i));
  trim(d);
  return d;
}

// Remainder of a by b scaled by a positive constant (|lc(b)| per elimination step).
Poly positive_pseudo_remainder(Poly a, const Poly& b) {
  const BigInt& lead = b.back();
  const BigInt lead_abs = abs(lead);
  const int lead_sign = sign_of(lead);
  const size_t db = b.size() - 1;
  trim(a);
  while (!a.empty() && a.size() - 1 >= db) {
    const size_t shift = a.size() - 1 - db;
    const BigInt top = a.back();
    for (auto& c : a) c *= lead_abs;
    for (size_t i = 0; i <= db; ++i) {
      if (lead_sign > 0) {
        a[i + shift] -= top * b[i];
      } else {
        a[i + shift] += top * b[i];
      }
    }
    trim(a);
  }
  return a;
}

int sign_at_neg_infinity(const Poly& p) {
  const int s = sign_of(p.back());
  return (p.size() - 1) % 2 == 0 ? s : -s;
}

int count_sign_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

void Params::validate() const {
  require(population >= 1, "hypergeometric population must be positive, got " + std::to_string(population));
  require(successes >= 0 && successes <= population,
          "hypergeometric successes must lie in [0, population], got " + std::to_string(successes));
  require(draws >= 0 && draws <= population,
          "hypergeometric draws must lie in [0, population], got " + std::to_string(draws));
}

int64_t Params::support_min() const { return std::max<int64_t>(0, draws - (population - successes)); }
int64_t Params::support_max() const { return std::min(successes, draws); }

int64_t Params::mode() const {
  const long double num = static_cast<long double>(draws + 1) * static_cast<long double>(successes + 1);
  const auto m = static_cast<int64_t>(std::floor(num / static_cast<long double>(population + 2)));
  return std::clamp(m, support_min(), support_max());
}

double Params::mean() const {
  return static_cast<double>(draws) * static_cast<double>(successes) / static_cast<double>(population);
}

double Params::variance() const {
  if (population <= 1) return 0.0;
  const double N = static_cast<double>(population);
  const double frac = static_cast<double>(successes) / N;
  return static_cast<double>(draws) * frac * (1.0 - frac) * static_cast<double>(population - draws) /
         (N - 1.0);
}

LogValue log_pmf(const Params& params, int64_t x) {
  params.validate();
  if (x < params.support_min() || x > params.support_max()) return LogValue::zero();
  const double N = static_cast<double>(params.population);
  const double n = static_cast<double>(params.draws);
  const double p = n / N;
  const double q = (N - n) / N;
  const double K = static_cast<double>(params.successes);
  const double xd = static_cast<double>(x);
  const double value = special::log_binomial_pmf(xd, K, p, q) +
                       special::log_binomial_pmf(n - xd, N - K, p, q) -
                       special::log_binomial_pmf(n, N, p, q);
  return LogValue{value};
}

LogValue log_tail(const Params& params, int64_t t) {
  params.validate();
  const int64_t lo = params.support_min();
  const int64_t hi = params.support_max();
  if (t <= lo) return LogValue::one();
  if (t > hi) return LogValue::zero();

  if (t > params.mode()) {
    // Upper side: terms decrease away from the mode.
    double rel = 1.0;
    double sum = 1.0;
    for (int64_t x = t; x < hi; ++x) {
      rel *= up_ratio(params, x);
      sum += rel;
      if (rel < sum * 1e-18) break;
    }
    return LogValue{log_pmf(params, t).log() + std::log(sum)};
  }

  // Lower side: P(X >= t) = 1 - P(X <= t - 1), with the lower sum small enough
  // that log1p keeps full precision.
  double rel = 1.0;
  double sum = 1.0;
  for (int64_t x = t - 1; x > lo; --x) {
    rel *= down_ratio(params, x);
    sum += rel;
    if (rel < sum * 1e-18) break;
  }
  const double lower = std::exp(log_pmf(params, t - 1).log()) * sum;
  return LogValue{std::log1p(-std::min(lower, 1.0))};
}

int64_t sample(const Params& params, Rng& rng) {
  params.validate();
  const int64_t lo = params.support_min();
  const int64_t hi = params.support_max();
  if (lo == hi) return lo;
  const int64_t mode = params.mode();
  const double p_mode = log_pmf(params, mode).linear();

  for (;;) {
    const double u = uniform01(rng);
    double acc = p_mode;
    if (u < acc) return mode;
    int64_t down = mode;
    int64_t up = mode;
    double p_down = p_mode;
    double p_up = p_mode;
    // Fixed visiting order mode, mode+1, mode-1, mode+2, ... keeps this an exact inversion.
    while (down > lo || up < hi) {
      if (up < hi) {
        p_up *= up_ratio(params, up);
        ++up;
        acc += p_up;
        if (u < acc) return up;
      }
      if (down > lo) {
        p_down *= down_ratio(params, down);
        --down;
        acc += p_down;
        if (u < acc) return down;
      }
    }
    // Rounding left acc a hair below 1 and u landed in the gap; redraw.
  }
}

DegreeMoments degree_moments(int64_t n, int64_t m) {
  require(n >= 2, "degree_moments needs n >= 2");
  const int64_t pairs = n * (n - 1) / 2;
  require(m >= 1 && m <= pairs, "degree_moments needs 1 <= m <= n(n-1)/2, got m=" + std::to_string(m));
  DegreeMoments out;
  out.mu = 2.0 * static_cast<double>(m) / static_cast<double>(n);
  if (pairs == 1) return out;
  const double N = static_cast<double>(pairs);
  const double p = static_cast<double>(m) / N;
  out.sigma2 = static_cast<double>(n - 1) * p * (1.0 - p) * (N / (N - 1.0)) *
               ((N - static_cast<double>(n - 1)) / (N - 1.0));
  return out;
}

double tilted_tail_gaussian(double a, double t) { return special::normal_sf(t - a); }

std::vector<double> exact_cumulants(const Params& params, int r_max) {
  params.validate();
  require(r_max >= 1 && r_max <= 8, "exact_cumulants supports orders 1..8");
  const int64_t lo = params.support_min();
  const int64_t hi = params.support_max();
  if (hi - lo + 1 > kMaxExactSupport) {
    throw CapacityError("exact_cumulants: support of " + std::to_string(hi - lo + 1) +
                        " points exceeds the exact-summation limit");
  }
  const double mean = params.mean();
  const double var = params.variance();
  require(var > 0.0, "exact_cumulants: degenerate distribution has zero variance");
  const double sd = std::sqrt(var);

  // Raw moments of Y = (X - mean) / sd.
  std::vector<double> moment(static_cast<size_t>(r_max) + 1, 0.0);
  for (int64_t x = lo; x <= hi; ++x) {
    const double w = log_pmf(params, x).linear();
    if (w == 0.0) continue;
    const double y = (static_cast<double>(x) - mean) / sd;
    double power = w;
    for (int j = 0; j <= r_max; ++j) {
      moment[static_cast<size_t>(j)] += power;
      power *= y;
    }
  }
  for (int j = 1; j <= r_max; ++j) moment[static_cast<size_t>(j)] /= moment[0];

  // kappa_r = m_r - sum_{i=1}^{r-1} C(r-1, i-1) kappa_i m_{r-i}
  std::vector<double> kappa(static_cast<size_t>(r_max) + 1, 0.0);
  for (int r = 1; r <= r_max; ++r) {
    double value = moment[static_cast<size_t>(r)];
    double binom = 1.0;  // C(r-1, i-1), starting at i = 1
    for (int i = 1; i < r; ++i) {
      value -= binom * kappa[static_cast<size_t>(i)] * moment[static_cast<size_t>(r - i)];
      binom = binom * (r - i) / i;
    }
    kappa[static_cast<size_t>(r)] = value;
  }
  return {kappa.begin() + 1, kappa.end()};
}

std::vector<double> stirling_second_kind_row(int r) {
  require(r >= 0, "Stirling row index must be nonnegative");
  std::vector<double> row{1.0};  // S(0, 0)
  for (int n = 1; n <= r; ++n) {
    std::vector<double> next(static_cast<size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
      const double carry = k < n ? row[static_cast<size_t>(k)] : 0.0;
      next[static_cast<size_t>(k)] = k * carry + row[static_cast<size_t>(k - 1)];
    }
    row = std::move(next);
  }
  return row;
}

double stirling_cumulant_bound(int r, double sigma) {
  require(r >= 3, "stirling_cumulant_bound is defined for r >= 3");
  require(sigma > 0.0, "stirling_cumulant_bound needs sigma > 0");
  const auto row = stirling_second_kind_row(r);
  double sum = 0.0;
  double factorial = 1.0;  // (q-1)!
  for (int q = 1; q <= r; ++q) {
    sum += factorial * row[static_cast<size_t>(q)];
    factorial *= q;
  }
  return 2.0 * sum / std::pow(sigma, r - 2);
}

std::optional<bool> pgf_real_rooted(const Params& params) {
  params.validate();
  if (params.successes == 0 || params.successes == params.population || params.draws == 0 ||
      params.draws == params.population) {
    return std::nullopt;
  }
  const int64_t lo = params.support_min();
  const int64_t hi = params.support_max();
  const int64_t degree = hi - lo;
  if (degree > kMaxPgfDegree) {
    throw CapacityError("pgf_real_rooted: degree " + std::to_string(degree) + " exceeds 64");
  }
  if (degree == 0) return true;

  // Integer multiple of the pmf: C(K, x) C(N - K, n - x) for x = lo..hi.
  Poly p;
  for (int64_t x = lo; x <= hi; ++x) {
    p.push_back(big_choose(params.successes, x) *
                big_choose(params.population - params.successes, params.draws - x));
  }
  make_primitive(p);

  std::vector<Poly> chain{p, derivative(p)};
  make_primitive(chain[1]);
  while (chain.back().size() > 1) {
    Poly r = positive_pseudo_remainder(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    make_primitive(r);
    chain.push_back(std::move(r));
  }
  // The last element is gcd(p, p') up to a constant, so p has
  // degree - deg(gcd) distinct roots.
  const auto gcd_degree = static_cast<int64_t>(chain.back().size()) - 1;
  const int64_t distinct_roots = degree - gcd_degree;

  std::vector<int> at_neg_inf;
  std::vector<int> at_zero;
  for (const auto& q : chain) {
    at_neg_inf.push_back(sign_at_neg_infinity(q));
    at_zero.push_back(sign_of(q.front()));
  }
  const int negative_roots = count_sign_changes(at_neg_inf) - count_sign_changes(at_zero);
  return negative_roots == distinct_roots;
}

DmlApproximation binomial_tail_dml(int64_t n, double p, double h) {
  const double var = static_cast<double>(n) * p * (1.0 - p);
  require(var > 0.0, "binomial_tail_dml needs np(1-p) > 0");
  require(h > 0.0, "binomial_tail_dml needs h > 0");
  DmlApproximation out;
  out.x = h / std::sqrt(var);
  out.probability = std::exp(-0.5 * out.x * out.x) / (out.x * std::sqrt(2.0 * std::numbers::pi));
  out.outside_validity = out.x <= 1.0 || out.x >= std::pow(var, 1.0 / 6.0);
  return out;
}

}  // namespace starlab::hypergeom
