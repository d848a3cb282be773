#include "starlab/lrt.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "starlab/errors.hpp"
#include "starlab/hypergeom.hpp"
#include "starlab/parallel.hpp"
#include "starlab/special.hpp"

namespace starlab::lrt {

namespace {

using BigInt = boost::multiprecision::cpp_int;

constexpr double kTieBand = 1e-9;
constexpr uint64_t kCacheCalibrationSeed = 0x10'7de9'5eedULL;

// Degree histogram over [lo, hi].
struct Histogram {
  int64_t lo = 0;
  std::vector<int64_t> counts;
};

Histogram histogram(std::span<const int64_t> degrees, int64_t floor_value) {
  Histogram h;
  int64_t hi = -1;
  int64_t lo = std::numeric_limits<int64_t>::max();
  for (int64_t d : degrees) {
    if (d < floor_value) continue;
    hi = std::max(hi, d);
    lo = std::min(lo, d);
  }
  if (hi < 0) return h;
  h.lo = lo;
  h.counts.assign(static_cast<size_t>(hi - lo + 1), 0);
  for (int64_t d : degrees) {
    if (d >= floor_value) ++h.counts[static_cast<size_t>(d - lo)];
  }
  return h;
}

void check_consistent(const DegreeVector& deg, const ModelParams& params) {
  params.validate();
  require(deg.n() == params.n, "degree vector length " + std::to_string(deg.n()) +
                                   " does not match n = " + std::to_string(params.n));
  require(deg.m == params.m, "degree vector edge count does not match m");
  deg.validate();
}

double log_prefactor(const ModelParams& p) {
  const auto N = static_cast<double>(p.pairs());
  const auto m = static_cast<double>(p.m);
  const auto n1 = static_cast<double>(p.n - 1);
  double acc = -std::log(static_cast<double>(p.n));
  for (int64_t j = 0; j < p.k; ++j) {
    const auto jd = static_cast<double>(j);
    acc += std::log(N - jd) - std::log(m - jd) - std::log(n1 - jd);
  }
  return acc;
}

BigInt big_falling(int64_t a, int64_t k) {
  BigInt acc = 1;
  for (int64_t j = 0; j < k; ++j) acc *= (a - j);
  return acc;
}

}  // namespace

int compare_lr_to_one(const DegreeVector& deg, const ModelParams& params) {
  check_consistent(deg, params);
  // Lambda >= 1  <=>  (N)_k sum_i (d_i)_k >= n (n-1)_k (m)_k.
  const Histogram h = histogram(deg.degrees, params.k);
  BigInt stars = 0;
  for (size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    stars += big_falling(h.lo + static_cast<int64_t>(i), params.k) * h.counts[i];
  }
  const BigInt lhs = big_falling(params.pairs(), params.k) * stars;
  const BigInt rhs = big_falling(params.n - 1, params.k) * big_falling(params.m, params.k) * params.n;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

LogValue log_lr_exact(const DegreeVector& deg, const ModelParams& params) {
  check_consistent(deg, params);
  const Histogram h = histogram(deg.degrees, params.k);
  if (h.counts.empty()) return LogValue::zero();
  LogSumExpAccumulator stars;
  for (size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    stars.add_weighted(special::log_falling(h.lo + static_cast<int64_t>(i), params.k),
                       static_cast<double>(h.counts[i]));
  }
  double value = log_prefactor(params) + stars.result();
  if (std::fabs(value) < kTieBand) {
    const int exact = compare_lr_to_one(deg, params);
    if (exact == 0) {
      value = 0.0;
    } else if ((exact > 0) != (value > 0.0)) {
      value = exact * std::numeric_limits<double>::min();
    }
  }
  return LogValue{value};
}

RemForm log_lr_rem_form(const DegreeVector& deg, const ModelParams& params) {
  check_consistent(deg, params);
  const auto moments = hypergeom::degree_moments(params.n, params.m);
  require(moments.sigma2 > 0.0, "REM form needs a nondegenerate degree variance");
  const double sigma = std::sqrt(moments.sigma2);
  const double a = static_cast<double>(params.k) * sigma / moments.mu;
  const Histogram h = histogram(deg.degrees, 0);
  LogSumExpAccumulator acc;
  for (size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    const double y = (static_cast<double>(h.lo + static_cast<int64_t>(i)) - moments.mu) / sigma;
    acc.add_weighted(a * y, static_cast<double>(h.counts[i]));
  }
  RemForm out;
  out.a_n = a;
  out.log_lr = LogValue{-0.5 * a * a - std::log(static_cast<double>(params.n)) + acc.result()};
  return out;
}

double max_degree_threshold(const ModelParams& params) {
  params.validate_null();
  const auto n = static_cast<double>(params.n);
  const double log_n = std::log(n);
  const double level = 2.0 * log_n - std::log(log_n) / params.alpha;
  require(log_n > 0.0 && level > 0.0,
          "max-degree threshold undefined: 2 ln n - ln ln n / alpha must be positive");
  const double mean = 2.0 * static_cast<double>(params.m) / n;
  const double spread = mean * (1.0 - params.density());
  return mean + std::sqrt(std::max(spread, 0.0)) * std::sqrt(level);
}

TestOutcome decide_max_degree(const DegreeVector& deg, const ModelParams& params) {
  TestOutcome out;
  out.threshold = max_degree_threshold(params);
  out.statistic = static_cast<double>(deg.max());
  out.decision = out.statistic >= out.threshold ? Decision::planted : Decision::null;
  out.auxiliary["max_degree"] = out.statistic;
  out.auxiliary["t_star"] = out.threshold;
  return out;
}

TestOutcome decide_lr(const DegreeVector& deg, const ModelParams& params) {
  TestOutcome out;
  out.statistic = log_lr_exact(deg, params).log();
  out.threshold = 0.0;
  out.decision = out.statistic >= out.threshold ? Decision::planted : Decision::null;
  out.auxiliary["log_lr"] = out.statistic;
  return out;
}

int64_t hub_estimate(std::span<const int64_t> degrees) {
  require(!degrees.empty(), "hub_estimate needs a nonempty degree vector");
  return std::max_element(degrees.begin(), degrees.end()) - degrees.begin();
}

double null_factorial_moment(int64_t n, int64_t m, int j) {
  const int64_t pairs = graph::pair_count(n);
  if (j > n - 1 || j > m) return 0.0;
  return std::exp(special::log_falling(n - 1, j) + special::log_falling(m, j) -
                  special::log_falling(pairs, j));
}

double LowDegreeCalibration::null_quantile(double q) const {
  require(!null_stats.empty(), "calibration holds no replicates");
  const auto idx = static_cast<size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(null_stats.size() - 1));
  return null_stats[idx];
}

namespace {

// sum_i (d_i)_j for j = 1..D.
std::vector<double> falling_sums(std::span<const int64_t> degrees, int D) {
  std::vector<double> sums(static_cast<size_t>(D), 0.0);
  const Histogram h = histogram(degrees, 0);
  for (size_t i = 0; i < h.counts.size(); ++i) {
    if (h.counts[i] == 0) continue;
    const auto d = static_cast<double>(h.lo + static_cast<int64_t>(i));
    const auto weight = static_cast<double>(h.counts[i]);
    double f = 1.0;
    for (int j = 1; j <= D; ++j) {
      f *= d - (j - 1);
      if (f == 0.0) break;
      sums[static_cast<size_t>(j - 1)] += weight * f;
    }
  }
  return sums;
}

double combine(const std::vector<double>& sums, const std::vector<double>& mean, const std::vector<double>& sd) {
  double s = 0.0;
  for (size_t j = 1; j < sums.size(); ++j) {
    if (sd[j] > 0.0) s += (sums[j] - mean[j]) / sd[j];
  }
  return s;
}

}  // namespace

LowDegreeCalibration calibrate_low_degree(int64_t n, int64_t m, int D, int64_t replicates, uint64_t seed) {
  const auto null_params = ModelParams::explicit_m(n, m, 1);
  null_params.validate_null();
  require(D >= 1 && D <= n - 1, "low-degree order D must lie in [1, n-1]");
  require(replicates >= 2, "calibration needs at least two replicates");

  LowDegreeCalibration cal;
  cal.n = n;
  cal.m = m;
  cal.D = D;
  cal.replicates = replicates;
  cal.null_mean.resize(static_cast<size_t>(D));
  for (int j = 1; j <= D; ++j) {
    cal.null_mean[static_cast<size_t>(j - 1)] = static_cast<double>(n) * null_factorial_moment(n, m, j);
  }

  std::vector<std::vector<double>> sums(static_cast<size_t>(replicates));
  parallel::for_each_replicate(replicates, 0, [&](int64_t r) {
    Rng rng = make_stream(seed, "low-degree-calibration", static_cast<uint64_t>(n), static_cast<uint64_t>(m),
                          static_cast<uint64_t>(r));
    const auto deg = graph::sample_null_degrees(null_params, rng);
    sums[static_cast<size_t>(r)] = falling_sums(deg.degrees, D);
  });

  cal.null_sd.assign(static_cast<size_t>(D), 0.0);
  for (size_t j = 1; j < static_cast<size_t>(D); ++j) {
    double mean = 0.0;
    for (const auto& s : sums) mean += s[j];
    mean /= static_cast<double>(replicates);
    double ss = 0.0;
    for (const auto& s : sums) ss += (s[j] - mean) * (s[j] - mean);
    cal.null_sd[j] = std::sqrt(ss / static_cast<double>(replicates - 1));
  }
  cal.null_stats.reserve(static_cast<size_t>(replicates));
  for (const auto& s : sums) cal.null_stats.push_back(combine(s, cal.null_mean, cal.null_sd));
  std::sort(cal.null_stats.begin(), cal.null_stats.end());
  return cal;
}

double low_degree_stat(const DegreeVector& deg, const LowDegreeCalibration& calibration) {
  require(deg.n() == calibration.n && deg.m == calibration.m, "calibration was built for another (n, m)");
  deg.validate();
  return combine(falling_sums(deg.degrees, calibration.D), calibration.null_mean, calibration.null_sd);
}

std::shared_ptr<const LowDegreeCalibration> cached_low_degree_calibration(int64_t n, int64_t m, int D) {
  using Key = std::tuple<int64_t, int64_t, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const LowDegreeCalibration>> cache;
  const Key key{n, m, D};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::unique_lock lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto cal = std::make_shared<const LowDegreeCalibration>(
      calibrate_low_degree(n, m, D, kDefaultCalibrationReplicates, kCacheCalibrationSeed));
  cache.emplace(key, cal);
  return cal;
}

double low_degree_stat(const DegreeVector& deg, const ModelParams& params, int D) {
  params.validate_null();
  require(D >= 1 && D <= params.n - 1, "low-degree order D must lie in [1, n-1]");
  require(deg.n() == params.n && deg.m == params.m, "degree vector does not match the model");
  if (D == 1) {
    deg.validate();
    return 0.0;
  }
  return low_degree_stat(deg, *cached_low_degree_calibration(params.n, params.m, D));
}

}  // namespace starlab::lrt
