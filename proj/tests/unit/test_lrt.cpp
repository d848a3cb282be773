#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "starlab/errors.hpp"
#include "starlab/graph_models.hpp"
#include "starlab/hypergeom.hpp"
#include "starlab/lrt.hpp"
#include "test_support.hpp"

namespace {

using namespace starlab;
using graph::DegreeVector;
using graph::ModelParams;

// Random degree vector in [0, n-1]^n with an even sum; not necessarily graphical.
DegreeVector fuzz_degrees(std::mt19937_64& gen, int64_t n) {
  std::uniform_int_distribution<int64_t> d(0, n - 1);
  DegreeVector deg;
  int64_t sum = 0;
  for (int64_t i = 0; i < n; ++i) {
    deg.degrees.push_back(d(gen));
    sum += deg.degrees.back();
  }
  if (sum % 2 == 1) {
    auto& x = deg.degrees[0];
    const int64_t step = x < n - 1 ? 1 : -1;
    x += step;
    sum += step;
  }
  deg.m = sum / 2;
  return deg;
}

// log of (N)_k / ((m)_k n (n-1)_k) in 50-digit arithmetic.
double reference_log_prefactor(const ModelParams& p) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  Big acc = -log(Big(p.n));
  for (int64_t j = 0; j < p.k; ++j) {
    acc += log(Big(p.pairs() - j)) - log(Big(p.m - j)) - log(Big(p.n - 1 - j));
  }
  return acc.convert_to<double>();
}

TEST(LogLrExact, StarOfSizeOneIsIdenticallyOne) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 10000; ++trial) {
    const int64_t n = std::uniform_int_distribution<int64_t>(2, 300)(gen);
    const auto deg = fuzz_degrees(gen, n);
    if (deg.m < 1) continue;
    const auto params = ModelParams::explicit_m(n, deg.m, 1);
    ASSERT_EQ(lrt::log_lr_exact(deg, params).log(), 0.0) << "n=" << n << " m=" << deg.m;
  }
  Rng rng = make_stream(21, "k1-samples", 0);
  for (auto params : {ModelParams::explicit_m(100, 400, 1), ModelParams::explicit_m(3000, 200000, 1)}) {
    for (int s = 0; s < 200; ++s) {
      ASSERT_EQ(lrt::log_lr_exact(graph::sample_null_degrees(params, rng), params).log(), 0.0);
      ASSERT_EQ(lrt::log_lr_exact(graph::sample_planted(params, rng).degrees, params).log(), 0.0);
    }
  }
}

TEST(LogLrExact, KnownValues) {
  const auto p = ModelParams::explicit_m(3, 2, 2);
  EXPECT_EQ(lrt::log_lr_exact(DegreeVector{{2, 1, 1}, 2}, p).log(), 0.0);
  EXPECT_EQ(lrt::log_lr_exact(DegreeVector{{1, 2, 1}, 2}, p).log(), 0.0);
  EXPECT_EQ(lrt::compare_lr_to_one(DegreeVector{{1, 1, 2}, 2}, p), 0);
  // Perfect matching on 6 vertices: every degree is 1 < k = 2.
  const auto q = ModelParams::explicit_m(6, 3, 2);
  EXPECT_TRUE(lrt::log_lr_exact(DegreeVector{{1, 1, 1, 1, 1, 1}, 3}, q).is_zero());
  EXPECT_EQ(lrt::decide_lr(DegreeVector{{1, 1, 1, 1, 1, 1}, 3}, q).decision, lrt::Decision::null);
}

TEST(LogLrExact, MatchesHighPrecisionDisplay) {
  Rng rng = make_stream(22, "lr-display", 0);
  for (auto params : {ModelParams::explicit_m(100, 400, 3), ModelParams::from_c(3000, 37, 0.25),
                      ModelParams::explicit_m(60, 900, 20)}) {
    for (int s = 0; s < 20; ++s) {
      const auto deg = graph::sample_planted(params, rng).degrees;
      using Big = boost::multiprecision::cpp_bin_float_50;
      Big stars = 0;
      for (auto d : deg.degrees) {
        Big term = 1;
        for (int64_t j = 0; j < params.k; ++j) term *= Big(d - j);
        if (d >= params.k) stars += term;
      }
      const double expect = reference_log_prefactor(params) + log(stars).convert_to<double>();
      EXPECT_NEAR(lrt::log_lr_exact(deg, params).log(), expect, 1e-9 * std::max(1.0, std::fabs(expect)));
    }
  }
}

TEST(LogLrExact, RejectsInconsistentInputs) {
  const auto p = ModelParams::explicit_m(4, 3, 2);
  EXPECT_THROW(lrt::log_lr_exact(DegreeVector{{2, 1, 1}, 2}, p), ParameterError);
  EXPECT_THROW(lrt::log_lr_exact(DegreeVector{{2, 2, 1, 0}, 3}, p), ParameterError);
  EXPECT_THROW(lrt::log_lr_exact(DegreeVector{{4, 1, 1, 0}, 3}, p), ParameterError);
}

TEST(LogLrExact, UnitNullMeanByMonteCarlo) {
  const auto params = ModelParams::explicit_m(100, 400, 3);
  Rng rng = make_stream(23, "unit-mean", 0);
  std::vector<double> lambda;
  for (int s = 0; s < 100000; ++s) lambda.push_back(lrt::log_lr_exact(graph::sample_null_degrees(params, rng), params).linear());
  EXPECT_NEAR(starlab::testing::mean(lambda), 1.0, 3.0 * starlab::testing::std_error(lambda));
}

TEST(LogLrExact, StarSumIsMonotoneInEachDegree) {
  std::mt19937_64 gen(24);
  for (int trial = 0; trial < 2000; ++trial) {
    const int64_t n = std::uniform_int_distribution<int64_t>(6, 60)(gen);
    auto deg = fuzz_degrees(gen, n);
    const int64_t k = std::uniform_int_distribution<int64_t>(1, 5)(gen);
    if (deg.m < k + 1) continue;
    // Raise two coordinates by one so the sum stays even.
    auto bumped = deg;
    const auto i = static_cast<size_t>(std::uniform_int_distribution<int64_t>(0, n - 1)(gen));
    const auto j = static_cast<size_t>(std::uniform_int_distribution<int64_t>(0, n - 1)(gen));
    if (i == j || bumped.degrees[i] == n - 1 || bumped.degrees[j] == n - 1) continue;
    ++bumped.degrees[i];
    ++bumped.degrees[j];
    ++bumped.m;
    const auto p0 = ModelParams::explicit_m(n, deg.m, k);
    const auto p1 = ModelParams::explicit_m(n, bumped.m, k);
    const double before = lrt::log_lr_exact(deg, p0).log() - reference_log_prefactor(p0);
    const double after = lrt::log_lr_exact(bumped, p1).log() - reference_log_prefactor(p1);
    EXPECT_GE(after, before - 1e-9);
  }
}

TEST(CompareLrToOne, AgreesWithFloatingSignAwayFromTies) {
  std::mt19937_64 gen(25);
  for (int trial = 0; trial < 3000; ++trial) {
    const int64_t n = std::uniform_int_distribution<int64_t>(4, 40)(gen);
    const auto deg = fuzz_degrees(gen, n);
    const int64_t k = std::uniform_int_distribution<int64_t>(1, 4)(gen);
    if (deg.m < k || k > n - 1) continue;
    const auto p = ModelParams::explicit_m(n, deg.m, k);
    const double v = lrt::log_lr_exact(deg, p).log();
    const int exact = lrt::compare_lr_to_one(deg, p);
    if (exact == 0) {
      EXPECT_EQ(v, 0.0);
    } else {
      EXPECT_EQ(exact > 0, v > 0.0);
    }
  }
}

TEST(RemForm, RegularGraphGivesMinusHalfASquared) {
  // Cycle on 5 vertices: every degree equals mu = 2.
  const auto p = ModelParams::explicit_m(5, 5, 1);
  const auto r = lrt::log_lr_rem_form(DegreeVector{{2, 2, 2, 2, 2}, 5}, p);
  EXPECT_NEAR(r.log_lr.log(), -0.5 * r.a_n * r.a_n, 1e-14);
  const auto dm = hypergeom::degree_moments(5, 5);
  EXPECT_NEAR(r.a_n, std::sqrt(dm.sigma2) / dm.mu, 1e-15);
  EXPECT_THROW(lrt::log_lr_rem_form(DegreeVector{{1, 1}, 1}, ModelParams::explicit_m(2, 1, 1)), ParameterError);
}

TEST(RemForm, WindowCenterScaleOfA) {
  for (int64_t n : {10000, 100000, 1000000}) {
    const auto k = static_cast<int64_t>(std::ceil(std::pow(static_cast<double>(n), 0.45)));
    const auto p = ModelParams::from_gamma(n, k, 0.0);
    std::vector<int64_t> flat(static_cast<size_t>(n), 0);
    // Any valid vector gives a_n; build one with the right sum.
    int64_t left = 2 * p.m;
    for (auto& d : flat) {
      d = std::min<int64_t>(left, (2 * p.m + n - 1) / n);
      left -= d;
    }
    const auto r = lrt::log_lr_rem_form(DegreeVector{flat, p.m}, p);
    const double ratio = r.a_n / std::sqrt(2.0 * std::log(static_cast<double>(n)));
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.1);
  }
}

TEST(MaxDegreeThreshold, KnownValues) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big n = 1000, m = 50000, N = 499500, a = 2;
  const Big expect = 2 * m / n + sqrt(2 * m / n * (1 - m / N)) * sqrt(2 * log(n) - log(log(n)) / a);
  const auto p = ModelParams::explicit_m(1000, 50000, 3);
  EXPECT_NEAR(lrt::max_degree_threshold(p), expect.convert_to<double>(), 1e-12);
  EXPECT_NEAR(lrt::max_degree_threshold(p), 134.01, 0.01);
  EXPECT_EQ(lrt::max_degree_threshold(ModelParams::explicit_m(50, 1225, 3)), 49.0);
  EXPECT_THROW(lrt::max_degree_threshold(ModelParams::explicit_m(3, 2, 1, 0.01)), ParameterError);
}

TEST(MaxDegreeThreshold, ApproachesHubMeanOnTheSigmaScale) {
  double prev = std::numeric_limits<double>::infinity();
  for (int64_t n : {10000, 100000, 1000000}) {
    const auto k = static_cast<int64_t>(std::ceil(std::pow(static_cast<double>(n), 0.45)));
    const auto p = ModelParams::from_gamma(n, k, 0.0);
    const auto dm = hypergeom::degree_moments(n, p.m);
    const double sigma = std::sqrt(dm.sigma2);
    const double gap = std::fabs(lrt::max_degree_threshold(p) - (dm.mu + static_cast<double>(k))) / sigma;
    EXPECT_LT(gap, prev) << n;
    prev = gap;
  }
}

DegreeVector with_max(int64_t n, int64_t m, int64_t top) {
  DegreeVector deg{std::vector<int64_t>(static_cast<size_t>(n), 0), m};
  deg.degrees[0] = top;
  int64_t left = 2 * m - top;
  for (size_t i = 1; i < deg.degrees.size(); ++i) {
    const int64_t slots = static_cast<int64_t>(deg.degrees.size() - i);
    deg.degrees[i] = (left + slots - 1) / slots;
    left -= deg.degrees[i];
  }
  return deg;
}

TEST(DecideMaxDegree, TieGoesToPlanted) {
  const auto p = ModelParams::explicit_m(1000, 50000, 3);
  const double t = lrt::max_degree_threshold(p);
  const auto at = lrt::decide_max_degree(with_max(1000, 50000, static_cast<int64_t>(std::ceil(t))), p);
  EXPECT_EQ(at.decision, lrt::Decision::planted);
  EXPECT_EQ(at.auxiliary.at("max_degree"), std::ceil(t));
  EXPECT_EQ(at.auxiliary.at("t_star"), t);
  const auto below = lrt::decide_max_degree(with_max(1000, 50000, static_cast<int64_t>(std::floor(t))), p);
  EXPECT_EQ(below.decision, lrt::Decision::null);
  // Exact tie at an integer threshold: the complete graph has t* = n - 1 = max degree.
  const auto full = ModelParams::explicit_m(10, 45, 2);
  EXPECT_EQ(lrt::decide_max_degree(DegreeVector{std::vector<int64_t>(10, 9), 45}, full).decision,
            lrt::Decision::planted);
}

TEST(Decisions, PlantedIffStatisticReachesThreshold) {
  std::mt19937_64 gen(26);
  for (int trial = 0; trial < 3000; ++trial) {
    const int64_t n = std::uniform_int_distribution<int64_t>(20, 200)(gen);
    const auto deg = fuzz_degrees(gen, n);
    const int64_t k = std::uniform_int_distribution<int64_t>(1, 6)(gen);
    if (deg.m < k) continue;
    const auto p = ModelParams::explicit_m(n, deg.m, k);
    for (const auto& o : {lrt::decide_lr(deg, p), lrt::decide_max_degree(deg, p)}) {
      EXPECT_EQ(o.decision == lrt::Decision::planted, o.statistic >= o.threshold);
    }
    const auto lr = lrt::decide_lr(deg, p);
    EXPECT_EQ(lr.auxiliary.at("log_lr"), lr.statistic);
    EXPECT_EQ(lr.threshold, 0.0);
    if (k == 1) EXPECT_EQ(lr.decision, lrt::Decision::planted);
  }
}

TEST(HubEstimate, SmallestArgmax) {
  EXPECT_EQ(lrt::hub_estimate(std::vector<int64_t>{3, 5, 5, 1}), 1);
  EXPECT_EQ(lrt::hub_estimate(std::vector<int64_t>{7}), 0);
  EXPECT_THROW(lrt::hub_estimate(std::vector<int64_t>{}), ParameterError);
  Rng rng = make_stream(27, "full-star", 0);
  const auto p = ModelParams::explicit_m(40, 100, 39);
  for (int s = 0; s < 500; ++s) {
    const auto sample = graph::sample_planted(p, rng);
    EXPECT_EQ(lrt::hub_estimate(sample.degrees.degrees), sample.hub);
  }
}

TEST(LowDegree, FactorialMomentsAreExact) {
  // E0[(d_1)_j] for Hypergeom(N, n-1, m) against summation over the pmf.
  const int64_t n = 30, m = 120;
  const hypergeom::Params law{graph::pair_count(n), n - 1, m};
  for (int j = 1; j <= 6; ++j) {
    double expect = 0.0;
    for (int64_t d = law.support_min(); d <= law.support_max(); ++d) {
      double falling = 1.0;
      for (int i = 0; i < j; ++i) falling *= static_cast<double>(d - i);
      expect += falling * hypergeom::log_pmf(law, d).linear();
    }
    EXPECT_NEAR(lrt::null_factorial_moment(n, m, j), expect, 1e-10 * expect) << j;
  }
}

TEST(LowDegree, DegreeOneIsZeroAndNullMeanIsZero) {
  const int64_t n = 1000;
  const auto k = static_cast<int64_t>(std::ceil(std::pow(1000.0, 0.45)));
  const auto p = ModelParams::from_c(n, k, 0.25);
  Rng rng = make_stream(28, "low-degree-null", 0);
  EXPECT_EQ(lrt::low_degree_stat(graph::sample_null_degrees(p, rng), p, 1), 0.0);
  const int D = 4;
  const auto calibration = lrt::cached_low_degree_calibration(n, p.m, D);
  ASSERT_EQ(calibration->replicates, lrt::kDefaultCalibrationReplicates);
  EXPECT_EQ(calibration.get(), lrt::cached_low_degree_calibration(n, p.m, D).get());
  EXPECT_EQ(calibration->null_sd[0], 0.0);
  std::vector<double> stats;
  for (int s = 0; s < 10000; ++s) stats.push_back(lrt::low_degree_stat(graph::sample_null_degrees(p, rng), p, D));
  EXPECT_NEAR(starlab::testing::mean(stats), 0.0, 3.0 * starlab::testing::std_error(stats));
  EXPECT_THROW(lrt::low_degree_stat(graph::sample_null_degrees(p, rng), p, 0), ParameterError);
  EXPECT_THROW(lrt::low_degree_stat(graph::sample_null_degrees(p, rng), p, static_cast<int>(n)), ParameterError);
}

TEST(LowDegree, CalibrationIsDeterministic) {
  const auto a = lrt::calibrate_low_degree(200, 1500, 3, 300, 9);
  const auto b = lrt::calibrate_low_degree(200, 1500, 3, 300, 9);
  EXPECT_EQ(a.null_sd, b.null_sd);
  EXPECT_EQ(a.null_stats, b.null_stats);
  EXPECT_TRUE(std::is_sorted(a.null_stats.begin(), a.null_stats.end()));
  EXPECT_LE(a.null_quantile(0.5), a.null_quantile(0.95));
}

}  // namespace
