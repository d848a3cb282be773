#include "starlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "starlab/errors.hpp"
#include "starlab/lrt.hpp"
#include "starlab/parallel.hpp"
#include "starlab/rem.hpp"
#include "starlab/special.hpp"

namespace starlab::harness {

namespace {

using graph::ModelParams;

constexpr std::string_view kNullTag = "window-null";
constexpr std::string_view kPlantedTag = "window-planted";
constexpr std::string_view kPhaseTag = "null-phase";
constexpr std::string_view kRemTag = "rem-phase";

constexpr int64_t kMaxEnumeratedGraphs = 1'000'000;

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

MetricEstimate proportion(std::string name, const std::vector<double>& indicators) {
  const double p = mean_of(indicators);
  const auto r = static_cast<int64_t>(indicators.size());
  return {std::move(name), p, std::sqrt(p * (1.0 - p) / static_cast<double>(r)), r};
}

MetricEstimate difference(std::string name, const MetricEstimate& a, const MetricEstimate& b) {
  return {std::move(name), a.estimate - b.estimate, std::hypot(a.std_error, b.std_error), a.replicates};
}

MetricEstimate exact_value(std::string name, double value, int64_t replicates) {
  return {std::move(name), value, 0.0, replicates};
}

std::string quantile_label(double q) {
  return "q" + std::to_string(static_cast<int>(std::lround(q * 100)));
}

void add_quantiles(GridPoint& point, const std::string& prefix, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto r = static_cast<int64_t>(values.size());
  for (double q : kQuantiles) {
    point.metrics.push_back(
        {prefix + "_" + quantile_label(q), sample_quantile(values, q), quantile_std_error(values, q), r});
  }
}

double gaussian_target(double gamma) { return special::normal_sf(gamma / std::numbers::sqrt2); }

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

RunRecord start_record(const RunConfig& cfg) {
  cfg.validate();
  RunRecord rec;
  rec.config = cfg;
  rec.tool_version = STARLAB_VERSION;
  const auto& model = cfg.model;
  if (cfg.experiment != Experiment::rem_phase && !in_asymptotic_regime(model.n, model.k)) {
    rec.out_of_regime = true;
    std::ostringstream msg;
    msg << "out_of_regime: k=" << model.k << " outside ((ln n)^2, sqrt(n)) for n=" << model.n;
    rec.warnings.push_back(msg.str());
  }
  return rec;
}

void note_clamp(RunRecord& rec, const ModelParams& p, double grid_value) {
  if (!p.clamped) return;
  std::ostringstream msg;
  msg << "clamped_m: grid value " << grid_value << " gives m outside [k, N]; using m=" << p.m;
  rec.warnings.push_back(msg.str());
}

void report(const Progress& progress, const std::string& line) {
  if (progress) progress(line);
}

// Model for grid point i of a window experiment.
ModelParams window_model(const RunConfig& cfg, size_t i) {
  const auto& base = cfg.model;
  if (cfg.grid.empty()) return ModelParams::explicit_m(base.n, base.m, base.k, base.alpha);
  return ModelParams::from_gamma(base.n, base.k, cfg.grid[i], base.alpha);
}

size_t point_count(const RunConfig& cfg) { return cfg.grid.empty() ? 1 : cfg.grid.size(); }

enum WindowSides : unsigned { kNullSide = 1, kPlantedSide = 2 };

// Shared kernel of the tv_sweep, agreement and recovery experiments.
RunRecord run_window(const RunConfig& cfg, unsigned sides, const Progress& progress) {
  const Timer timer;
  RunRecord rec = start_record(cfg);
  const int64_t reps = cfg.replicates;

  for (size_t i = 0; i < point_count(cfg); ++i) {
    const ModelParams params = window_model(cfg, i);
    params.validate();
    GridPoint point;
    point.grid_value = cfg.grid.empty() ? static_cast<double>(params.m) : cfg.grid[i];
    point.m = params.m;
    note_clamp(rec, params, point.grid_value);
    const double t_star = lrt::max_degree_threshold(params);

    std::vector<double> null_log_lr, null_max, planted_log_lr, planted_max, hub_hit;
    if (sides & kNullSide) {
      null_log_lr.resize(static_cast<size_t>(reps));
      null_max.resize(static_cast<size_t>(reps));
      parallel::for_each_replicate(reps, cfg.threads, [&](int64_t r) {
        Rng rng = make_stream(cfg.seed, kNullTag, i, static_cast<uint64_t>(r));
        const auto deg = graph::sample_null_degrees(params, rng);
        null_log_lr[static_cast<size_t>(r)] = lrt::log_lr_exact(deg, params).log();
        null_max[static_cast<size_t>(r)] = static_cast<double>(deg.max());
      });
    }
    if (sides & kPlantedSide) {
      planted_log_lr.resize(static_cast<size_t>(reps));
      planted_max.resize(static_cast<size_t>(reps));
      hub_hit.resize(static_cast<size_t>(reps));
      parallel::for_each_replicate(reps, cfg.threads, [&](int64_t r) {
        Rng rng = make_stream(cfg.seed, kPlantedTag, i, static_cast<uint64_t>(r));
        const auto sample = graph::sample_planted(params, rng);
        planted_log_lr[static_cast<size_t>(r)] = lrt::log_lr_exact(sample.degrees, params).log();
        planted_max[static_cast<size_t>(r)] = static_cast<double>(sample.degrees.max());
        hub_hit[static_cast<size_t>(r)] = lrt::hub_estimate(sample.degrees.degrees) == sample.hub ? 1.0 : 0.0;
      });
    }

    auto indicator = [](const std::vector<double>& xs, auto pred) {
      std::vector<double> out(xs.size());
      std::transform(xs.begin(), xs.end(), out.begin(), [&](double x) { return pred(x) ? 1.0 : 0.0; });
      return out;
    };
    auto lr_planted = [](double log_lr) { return log_lr >= 0.0; };
    auto md_planted = [t_star](double max_deg) { return max_deg >= t_star; };
    auto disagreement = [&](const std::vector<double>& log_lr, const std::vector<double>& max_deg) {
      std::vector<double> out(log_lr.size());
      for (size_t r = 0; r < out.size(); ++r) {
        out[r] = lr_planted(log_lr[r]) != md_planted(max_deg[r]) ? 1.0 : 0.0;
      }
      return out;
    };
    const bool has_target = !cfg.grid.empty();
    const double target = has_target ? gaussian_target(point.grid_value) : 0.0;

    const bool want_tv = cfg.experiment == Experiment::tv_sweep;
    const bool want_agreement = want_tv || cfg.experiment == Experiment::agreement;
    const bool want_recovery = want_tv || cfg.experiment == Experiment::recovery;

    if (want_tv) {
      const auto p0_lr = proportion("p0_lr", indicator(null_log_lr, lr_planted));
      const auto p1_lr = proportion("p1_lr", indicator(planted_log_lr, lr_planted));
      const auto p0_md = proportion("p0_maxdeg", indicator(null_max, md_planted));
      const auto p1_md = proportion("p1_maxdeg", indicator(planted_max, md_planted));
      point.metrics.push_back(p0_lr);
      point.metrics.push_back(p1_lr);
      point.metrics.push_back(difference("tv_lr", p1_lr, p0_lr));
      point.metrics.push_back(p0_md);
      point.metrics.push_back(p1_md);
      point.metrics.push_back(difference("tv_maxdeg", p1_md, p0_md));
      if (has_target) point.metrics.push_back(exact_value("tv_target", target, reps));
    }
    if (want_agreement) {
      point.metrics.push_back(proportion("disagree_p0", disagreement(null_log_lr, null_max)));
      point.metrics.push_back(proportion("disagree_p1", disagreement(planted_log_lr, planted_max)));
    }
    if (want_recovery) {
      point.metrics.push_back(proportion("recovery", hub_hit));
      if (has_target) point.metrics.push_back(exact_value("recovery_target", target, reps));
    }
    point.metrics.push_back(exact_value("t_star", t_star, reps));

    if (sides & kNullSide) {
      point.replicate_values["null_log_lr"] = std::move(null_log_lr);
      point.replicate_values["null_max_degree"] = std::move(null_max);
    }
    if (sides & kPlantedSide) {
      point.replicate_values["planted_log_lr"] = std::move(planted_log_lr);
      point.replicate_values["planted_max_degree"] = std::move(planted_max);
      point.replicate_values["planted_hub_hit"] = std::move(hub_hit);
    }
    rec.per_point.push_back(std::move(point));
    std::ostringstream line;
    line << to_string(cfg.experiment) << ": point " << (i + 1) << "/" << point_count(cfg) << " m=" << params.m
         << " done";
    report(progress, line.str());
  }
  rec.wall_time = timer.seconds();
  return rec;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::tv_sweep: return "tv_sweep";
    case Experiment::null_phase: return "null_phase";
    case Experiment::agreement: return "agreement";
    case Experiment::recovery: return "recovery";
    case Experiment::rem_phase: return "rem_phase";
    case Experiment::enumerate: return "enumerate";
  }
  return "unknown";
}

Experiment experiment_from_string(std::string_view name) {
  for (auto e : {Experiment::tv_sweep, Experiment::null_phase, Experiment::agreement, Experiment::recovery,
                 Experiment::rem_phase, Experiment::enumerate}) {
    if (to_string(e) == name) return e;
  }
  throw ParameterError("unknown experiment \"" + std::string(name) + "\"");
}

void RunConfig::validate() const {
  require(replicates >= 1, "replicates must be at least 1");
  require(threads >= 0, "threads must be nonnegative");
  switch (experiment) {
    case Experiment::tv_sweep:
    case Experiment::agreement:
    case Experiment::recovery:
      require(model.n >= 3, "window experiments need n >= 3");
      require(model.k >= 1 && model.k <= model.n - 1, "k must lie in [1, n-1]");
      if (grid.empty()) model.validate();
      break;
    case Experiment::null_phase:
      require(!grid.empty(), "null_phase needs a grid of c values");
      require(model.n >= 3, "null_phase needs n >= 3");
      require(model.k >= 1 && model.k <= model.n - 1, "k must lie in [1, n-1]");
      break;
    case Experiment::rem_phase:
      require(!grid.empty(), "rem_phase needs a grid of c values");
      require(model.n >= 2, "rem_phase needs n >= 2");
      break;
    case Experiment::enumerate:
      model.validate();
      break;
  }
}

std::string RunConfig::grid_name() const {
  switch (experiment) {
    case Experiment::tv_sweep:
    case Experiment::agreement:
    case Experiment::recovery:
      return grid.empty() ? "m" : "gamma";
    case Experiment::null_phase:
    case Experiment::rem_phase:
      return "c";
    case Experiment::enumerate:
      return "none";
  }
  return "none";
}

const MetricEstimate& GridPoint::metric(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.metric == name) return m;
  }
  throw ParameterError("no metric named \"" + std::string(name) + "\"");
}

bool in_asymptotic_regime(int64_t n, int64_t k) {
  const double log_n = std::log(static_cast<double>(n));
  const auto kd = static_cast<double>(k);
  return kd > log_n * log_n && kd < std::sqrt(static_cast<double>(n));
}

double sample_quantile(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  if (sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_std_error(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), "quantile of an empty sample");
  const auto n = static_cast<double>(sorted.size());
  const double spread = std::sqrt(n * q * (1.0 - q));
  const auto last = static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::clamp(std::floor(n * q - spread), 0.0, last));
  const auto hi = static_cast<size_t>(std::clamp(std::ceil(n * q + spread), 0.0, last));
  if (sorted[hi] == sorted[lo]) return 0.0;
  return 0.5 * (sorted[hi] - sorted[lo]);
}

RunRecord run_tv_sweep(const RunConfig& cfg, const Progress& progress) {
  require(cfg.experiment == Experiment::tv_sweep, "config is not a tv_sweep");
  return run_window(cfg, kNullSide | kPlantedSide, progress);
}

RunRecord run_agreement(const RunConfig& cfg, const Progress& progress) {
  require(cfg.experiment == Experiment::agreement, "config is not an agreement run");
  return run_window(cfg, kNullSide | kPlantedSide, progress);
}

RunRecord run_recovery(const RunConfig& cfg, const Progress& progress) {
  require(cfg.experiment == Experiment::recovery, "config is not a recovery run");
  return run_window(cfg, kPlantedSide, progress);
}

RunRecord run_null_phase(const RunConfig& cfg, const Progress& progress) {
  require(cfg.experiment == Experiment::null_phase, "config is not a null_phase run");
  const Timer timer;
  RunRecord rec = start_record(cfg);
  const int64_t reps = cfg.replicates;
  for (size_t i = 0; i < cfg.grid.size(); ++i) {
    const auto params = ModelParams::from_c(cfg.model.n, cfg.model.k, cfg.grid[i], cfg.model.alpha);
    params.validate();
    GridPoint point;
    point.grid_value = cfg.grid[i];
    point.m = params.m;
    note_clamp(rec, params, point.grid_value);

    std::vector<double> log_lr(static_cast<size_t>(reps));
    std::vector<double> log_rem(static_cast<size_t>(reps));
    parallel::for_each_replicate(reps, cfg.threads, [&](int64_t r) {
      Rng rng = make_stream(cfg.seed, kPhaseTag, i, static_cast<uint64_t>(r));
      const auto deg = graph::sample_null_degrees(params, rng);
      log_lr[static_cast<size_t>(r)] = lrt::log_lr_exact(deg, params).log();
      log_rem[static_cast<size_t>(r)] = lrt::log_lr_rem_form(deg, params).log_lr.log();
    });
    std::vector<double> lambda(log_lr.size());
    std::vector<double> rem_form(log_rem.size());
    std::transform(log_lr.begin(), log_lr.end(), lambda.begin(), [](double x) { return std::exp(x); });
    std::transform(log_rem.begin(), log_rem.end(), rem_form.begin(), [](double x) { return std::exp(x); });
    add_quantiles(point, "lambda", lambda);
    add_quantiles(point, "log_lambda", log_lr);
    add_quantiles(point, "rem_form", rem_form);
    add_quantiles(point, "log_rem_form", log_rem);
    point.replicate_values["log_lr"] = std::move(log_lr);
    point.replicate_values["log_rem_form"] = std::move(log_rem);
    rec.per_point.push_back(std::move(point));
    report(progress, "null_phase: point " + std::to_string(i + 1) + "/" + std::to_string(cfg.grid.size()) +
                         " m=" + std::to_string(params.m) + " done");
  }
  rec.wall_time = timer.seconds();
  return rec;
}

RunRecord run_rem_phase(const RunConfig& cfg, const Progress& progress) {
  require(cfg.experiment == Experiment::rem_phase, "config is not a rem_phase run");
  const Timer timer;
  RunRecord rec = start_record(cfg);
  const int64_t reps = cfg.replicates;
  for (size_t i = 0; i < cfg.grid.size(); ++i) {
    const auto params = rem::RemParams::from_graph(cfg.model.n, cfg.grid[i]);
    GridPoint point;
    point.grid_value = cfg.grid[i];
    point.m = 0;
    std::vector<double> ratio(static_cast<size_t>(reps));
    parallel::for_each_replicate(reps, cfg.threads, [&](int64_t r) {
      Rng rng = make_stream(cfg.seed, kRemTag, i, static_cast<uint64_t>(r));
      ratio[static_cast<size_t>(r)] = rem::rem_normalized(params, rng);
    });
    std::vector<double> sorted = ratio;
    std::sort(sorted.begin(), sorted.end());
    add_quantiles(point, "z_ratio", sorted);
    const auto& q25 = point.metric("z_ratio_q25");
    const auto& q75 = point.metric("z_ratio_q75");
    point.metrics.push_back(
        {"z_ratio_iqr", q75.estimate - q25.estimate, std::hypot(q25.std_error, q75.std_error), reps});
    double var = 0.0;
    const double mean = mean_of(ratio);
    for (double x : ratio) var += (x - mean) * (x - mean);
    var = reps > 1 ? var / static_cast<double>(reps - 1) : 0.0;
    point.metrics.push_back({"z_ratio_mean", mean, std::sqrt(var / static_cast<double>(reps)), reps});
    point.replicate_values["z_ratio"] = std::move(ratio);
    rec.per_point.push_back(std::move(point));
    report(progress, "rem_phase: point " + std::to_string(i + 1) + "/" + std::to_string(cfg.grid.size()) + " done");
  }
  rec.wall_time = timer.seconds();
  return rec;
}

EnumerationResult exact_enumeration(int64_t n, int64_t m, int64_t k) {
  const auto params = ModelParams::explicit_m(n, m, k);
  params.validate();
  if (n > 6) throw CapacityError("exact_enumeration supports n <= 6");
  const int64_t pairs = params.pairs();
  const double graphs = std::exp(special::log_choose(pairs, m));
  if (graphs > static_cast<double>(kMaxEnumeratedGraphs) + 0.5) {
    throw CapacityError("exact_enumeration: C(N, m) exceeds 10^6 graphs");
  }

  // Planted pmf: sum_i C(d_i, k) / (n C(n-1, k) C(N-k, m-k)).
  auto choose = [](int64_t a, int64_t b) {
    if (b < 0 || b > a) return 0.0;
    return std::round(std::exp(special::log_choose(a, b)));
  };
  const double p1_norm = static_cast<double>(n) * choose(n - 1, k) * choose(pairs - k, m - k);
  const double p0 = 1.0 / choose(pairs, m);

  EnumerationResult out;
  out.n = n;
  out.m = m;
  out.k = k;
  double tv_sum = 0.0;
  std::vector<uint64_t> subset(static_cast<size_t>(m));
  for (int64_t i = 0; i < m; ++i) subset[static_cast<size_t>(i)] = static_cast<uint64_t>(i);
  for (;;) {
    graph::DegreeVector deg{graph::degrees_from_codes(n, subset), m};
    double stars = 0.0;
    for (int64_t d : deg.degrees) stars += choose(d, k);
    EnumeratedGraph g;
    g.codes = subset;
    g.p0 = p0;
    g.p1 = stars / p1_norm;
    g.log_lr = lrt::log_lr_exact(deg, params).log();
    out.p1_total += g.p1;
    out.e0_lambda += g.p0 * std::exp(g.log_lr);
    tv_sum += std::fabs(g.p1 - g.p0);
    if (g.log_lr >= 0.0) out.tv_ordered += g.p1 - g.p0;
    out.lr_table.push_back(std::move(g));

    // Next m-subset of [0, pairs) in lexicographic order.
    int64_t pos = m - 1;
    while (pos >= 0 && subset[static_cast<size_t>(pos)] == static_cast<uint64_t>(pairs - m + pos)) --pos;
    if (pos < 0) break;
    ++subset[static_cast<size_t>(pos)];
    for (int64_t j = pos + 1; j < m; ++j) subset[static_cast<size_t>(j)] = subset[static_cast<size_t>(j - 1)] + 1;
  }
  out.tv = 0.5 * tv_sum;
  return out;
}

RunRecord run_enumerate(const RunConfig& cfg, const Progress& progress) {
  require(cfg.experiment == Experiment::enumerate, "config is not an enumerate run");
  const Timer timer;
  RunRecord rec = start_record(cfg);
  const auto result = exact_enumeration(cfg.model.n, cfg.model.m, cfg.model.k);
  GridPoint point;
  point.grid_value = 0.0;
  point.m = cfg.model.m;
  point.metrics.push_back(exact_value("tv", result.tv, cfg.replicates));
  point.metrics.push_back(exact_value("tv_ordered", result.tv_ordered, cfg.replicates));
  point.metrics.push_back(exact_value("e0_lambda", result.e0_lambda, cfg.replicates));
  point.metrics.push_back(exact_value("p1_total", result.p1_total, cfg.replicates));
  point.metrics.push_back(
      exact_value("graphs", static_cast<double>(result.lr_table.size()), cfg.replicates));
  std::vector<double> log_lr;
  for (const auto& g : result.lr_table) log_lr.push_back(g.log_lr);
  point.replicate_values["log_lr_by_graph"] = std::move(log_lr);
  rec.per_point.push_back(std::move(point));
  report(progress, "enumerate: " + std::to_string(result.lr_table.size()) + " graphs");
  rec.wall_time = timer.seconds();
  return rec;
}

RunRecord run(const RunConfig& cfg, const Progress& progress) {
  switch (cfg.experiment) {
    case Experiment::tv_sweep: return run_tv_sweep(cfg, progress);
    case Experiment::null_phase: return run_null_phase(cfg, progress);
    case Experiment::agreement: return run_agreement(cfg, progress);
    case Experiment::recovery: return run_recovery(cfg, progress);
    case Experiment::rem_phase: return run_rem_phase(cfg, progress);
    case Experiment::enumerate: return run_enumerate(cfg, progress);
  }
  throw ParameterError("unknown experiment");
}

}  // namespace starlab::harness
