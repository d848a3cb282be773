#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "starlab/graph_models.hpp"
#include "starlab/log_value.hpp"

// Test statistics and decision rules for planted-star detection.
namespace starlab::lrt {

using graph::DegreeVector;
using graph::ModelParams;

enum class Decision { null, planted };

/// Result of a test. `decision` is planted iff statistic >= threshold.
struct TestOutcome {
  Decision decision = Decision::null;
  double statistic = 0.0;
  double threshold = 0.0;
  /// Diagnostics under stable keys: "a_n", "max_degree", "log_lr", "t_star".
  std::map<std::string, double> auxiliary;
};

/// Exact log-likelihood ratio log(dP1/dP0) of a graph with these degrees:
///   log[(N)_k / ((m)_k n (n-1)_k)] + log sum_i (d_i)_k.
/// When the floating-point value lands within 1e-9 of zero the sign is
/// settled in exact integer arithmetic, and an exact tie returns exactly 0.
LogValue log_lr_exact(const DegreeVector& deg, const ModelParams& params);

/// Exact comparison of the likelihood ratio with 1: -1, 0 or +1.
int compare_lr_to_one(const DegreeVector& deg, const ModelParams& params);

struct RemForm {
  LogValue log_lr;
  double a_n = 0.0;
};

/// REM-type approximation e^{-a^2/2} (1/n) sum_i e^{a Y_i}, a = k sigma / mu.
RemForm log_lr_rem_form(const DegreeVector& deg, const ModelParams& params);

/// t* = 2m/n + sqrt((2m/n)(1 - m/N)) sqrt(2 ln n - ln ln n / alpha).
double max_degree_threshold(const ModelParams& params);

TestOutcome decide_max_degree(const DegreeVector& deg, const ModelParams& params);
TestOutcome decide_lr(const DegreeVector& deg, const ModelParams& params);

/// Smallest index attaining the maximum degree.
int64_t hub_estimate(std::span<const int64_t> degrees);

/// Null calibration of the signed star-count statistic for one (n, m, D).
struct LowDegreeCalibration {
  int64_t n = 0;
  int64_t m = 0;
  int D = 0;
  int64_t replicates = 0;
  std::vector<double> null_mean;  // E0[sum_i (d_i)_j], j = 1..D (index j - 1)
  std::vector<double> null_sd;    // Monte Carlo sd of sum_i (d_i)_j; 0 for j = 1
  std::vector<double> null_stats; // S_D on the calibration replicates, sorted

  /// Upper quantile of S_D under the null from the calibration replicates.
  double null_quantile(double q) const;
};

/// Calibrates sd_j from `replicates` null samples drawn from streams keyed by
/// (seed, n, m). Deterministic for fixed arguments.
LowDegreeCalibration calibrate_low_degree(int64_t n, int64_t m, int D, int64_t replicates, uint64_t seed);

/// S_D = sum_{j=2}^{D} [sum_i (d_i)_j - n E0(d)_j] / sd_j. The j = 1 term is
/// identically zero by the handshake identity and contributes nothing.
double low_degree_stat(const DegreeVector& deg, const LowDegreeCalibration& calibration);

/// Same, using a process-wide cache calibrated once per (n, m, D) with
/// `kDefaultCalibrationReplicates` null replicates.
double low_degree_stat(const DegreeVector& deg, const ModelParams& params, int D);

inline constexpr int64_t kDefaultCalibrationReplicates = 10'000;

std::shared_ptr<const LowDegreeCalibration> cached_low_degree_calibration(int64_t n, int64_t m, int D);

/// Exact null factorial moment E0[(d_1)_j] = (n-1)_j (m)_j / (N)_j.
double null_factorial_moment(int64_t n, int64_t m, int j);

}  // namespace starlab::lrt
