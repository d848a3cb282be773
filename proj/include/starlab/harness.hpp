#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "starlab/graph_models.hpp"

// Seeded Monte Carlo experiments and exact small-instance oracles.
//
// Every replicate draws from a stream keyed by (seed, experiment tag, grid
// index, replicate index) and writes only its own slot; aggregation walks the
// slots in index order. Results are therefore identical for any thread count.
namespace starlab::harness {

enum class Experiment { tv_sweep, null_phase, agreement, recovery, rem_phase, enumerate };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

inline constexpr int64_t kDefaultReplicates = 2000;
inline constexpr double kQuantiles[] = {0.10, 0.25, 0.50, 0.75, 0.90};

struct RunConfig {
  graph::ModelParams model;  // n, k, alpha; m is used when the grid is empty
  int64_t replicates = kDefaultReplicates;
  uint64_t seed = 0;
  Experiment experiment = Experiment::tv_sweep;
  /// gamma values (tv_sweep, agreement, recovery) or c values (null_phase,
  /// rem_phase). Window experiments accept an empty grid and then run one
  /// point at model.m.
  std::vector<double> grid;
  int threads = 0;

  void validate() const;
  /// "gamma", "c", "m" or "none".
  std::string grid_name() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct MetricEstimate {
  std::string metric;
  double estimate = 0.0;
  double std_error = 0.0;
  int64_t replicates = 0;

  friend bool operator==(const MetricEstimate&, const MetricEstimate&) = default;
};

struct GridPoint {
  double grid_value = 0.0;
  int64_t m = 0;
  std::vector<MetricEstimate> metrics;
  /// Raw per-replicate values, keyed by name, in replicate order.
  std::map<std::string, std::vector<double>> replicate_values;

  const MetricEstimate& metric(std::string_view name) const;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct RunRecord {
  RunConfig config;
  std::vector<GridPoint> per_point;
  double wall_time = 0.0;
  std::string tool_version;
  std::vector<std::string> warnings;
  bool out_of_regime = false;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

using Progress = std::function<void(std::string_view)>;

/// P0(Lambda >= 1), P1(Lambda >= 1), their difference, the same for the
/// max-degree test, the target 1 - Phi(gamma / sqrt 2), and (from the same
/// replicates) test disagreement and hub recovery.
RunRecord run_tv_sweep(const RunConfig& cfg, const Progress& progress = {});

/// Quantiles of Lambda and of its REM-form approximation under the null.
RunRecord run_null_phase(const RunConfig& cfg, const Progress& progress = {});

/// Frequency of {Lambda >= 1} xor {max degree >= t*} under each hypothesis.
RunRecord run_agreement(const RunConfig& cfg, const Progress& progress = {});

/// Frequency with which the max-degree vertex is the planted hub.
RunRecord run_recovery(const RunConfig& cfg, const Progress& progress = {});

/// Quantiles of Z/E[Z] for the random energy model with n_energies = model.n.
RunRecord run_rem_phase(const RunConfig& cfg, const Progress& progress = {});

struct EnumeratedGraph {
  std::vector<uint64_t> codes;
  double p0 = 0.0;
  double p1 = 0.0;
  double log_lr = 0.0;
};

struct EnumerationResult {
  int64_t n = 0;
  int64_t m = 0;
  int64_t k = 0;
  double tv = 0.0;          // (1/2) sum |P1 - P0|
  double tv_ordered = 0.0;  // P1(Lambda >= 1) - P0(Lambda >= 1)
  double e0_lambda = 0.0;   // sum P0 Lambda
  double p1_total = 0.0;    // sum P1, must be 1
  std::vector<EnumeratedGraph> lr_table;
};

/// Walks all m-subsets of the N pairs. Needs n <= 6 and C(N, m) <= 10^6.
EnumerationResult exact_enumeration(int64_t n, int64_t m, int64_t k);

RunRecord run_enumerate(const RunConfig& cfg, const Progress& progress = {});

RunRecord run(const RunConfig& cfg, const Progress& progress = {});

/// Distribution-free standard error of a sample quantile (half the spread of
/// the order statistics one binomial sd either side). `sorted` must be sorted.
double quantile_std_error(const std::vector<double>& sorted, double q);
double sample_quantile(const std::vector<double>& sorted, double q);

/// (log n)^2 < k < sqrt(n), the regime the asymptotic statements assume.
bool in_asymptotic_regime(int64_t n, int64_t k);

}  // namespace starlab::harness
