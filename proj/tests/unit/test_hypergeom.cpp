#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/hypergeometric.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "starlab/errors.hpp"
#include "starlab/hypergeom.hpp"
#include "test_support.hpp"

namespace {

using namespace starlab;
using hypergeom::Params;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

boost::math::hypergeometric_distribution<double> boost_law(const Params& p) {
  return {static_cast<unsigned>(p.successes), static_cast<unsigned>(p.draws), static_cast<unsigned>(p.population)};
}

// Random valid parameters with population in [2, max_population].
Params random_params(std::mt19937_64& gen, int64_t max_population) {
  std::uniform_int_distribution<int64_t> pop(2, max_population);
  Params p;
  p.population = pop(gen);
  p.successes = std::uniform_int_distribution<int64_t>(0, p.population)(gen);
  p.draws = std::uniform_int_distribution<int64_t>(0, p.population)(gen);
  return p;
}

TEST(HypergeomParams, SupportAndValidation) {
  const Params p{10, 4, 3};
  EXPECT_EQ(p.support_min(), 0);
  EXPECT_EQ(p.support_max(), 3);
  EXPECT_EQ((Params{10, 8, 5}.support_min()), 3);
  EXPECT_THROW((Params{0, 0, 0}.validate()), ParameterError);
  EXPECT_THROW((Params{10, 11, 3}.validate()), ParameterError);
  EXPECT_THROW((Params{10, 4, -1}.validate()), ParameterError);
  EXPECT_THROW(hypergeom::log_pmf(Params{10, 4, 11}, 2), ParameterError);
}

TEST(HypergeomLogPmf, KnownValues) {
  EXPECT_NEAR(hypergeom::log_pmf({10, 4, 3}, 2).log(), std::log(0.3), 1e-14);
  EXPECT_TRUE(hypergeom::log_pmf({10, 4, 3}, 5).is_zero());
  EXPECT_TRUE(hypergeom::log_pmf({10, 4, 3}, -1).is_zero());
  EXPECT_EQ(hypergeom::log_pmf({10, 4, 0}, 0).log(), 0.0);
}

TEST(HypergeomLogPmf, MatchesBoostOnRandomInstances) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Params p = random_params(gen, 400);
    const auto law = boost_law(p);
    for (int64_t x = p.support_min(); x <= p.support_max(); ++x) {
      const double expect = std::log(boost::math::pdf(law, static_cast<unsigned>(x)));
      if (expect < -600) continue;
      EXPECT_NEAR(hypergeom::log_pmf(p, x).log(), expect, 1e-11 * std::max(1.0, std::fabs(expect)));
    }
  }
}

TEST(HypergeomLogPmf, NormalizesToOne) {
  std::mt19937_64 gen(12);
  std::vector<Params> cases = {{10, 4, 3}, {449985000, 29999, 16400000}, {1000000, 10000, 500000}};
  for (int i = 0; i < 100; ++i) cases.push_back(random_params(gen, 20000));
  for (const auto& p : cases) {
    if (p.support_max() - p.support_min() > 10000) continue;
    LogSumExpAccumulator acc;
    for (int64_t x = p.support_min(); x <= p.support_max(); ++x) acc.add(hypergeom::log_pmf(p, x).log());
    EXPECT_NEAR(std::exp(acc.result()), 1.0, 1e-12) << p.population << " " << p.successes << " " << p.draws;
  }
}

TEST(HypergeomLogPmf, MomentsMatchDegreeMoments) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t n = std::uniform_int_distribution<int64_t>(3, 80)(gen);
    const int64_t pairs = n * (n - 1) / 2;
    const int64_t m = std::uniform_int_distribution<int64_t>(1, pairs)(gen);
    const Params p{pairs, n - 1, m};
    double mean = 0.0, second = 0.0;
    for (int64_t x = p.support_min(); x <= p.support_max(); ++x) {
      const double w = hypergeom::log_pmf(p, x).linear();
      mean += w * static_cast<double>(x);
      second += w * static_cast<double>(x) * static_cast<double>(x);
    }
    const auto dm = hypergeom::degree_moments(n, m);
    EXPECT_NEAR(mean, dm.mu, 1e-9 * dm.mu);
    // The displayed sigma^2 carries one extra factor N/(N-1) over the exact
    // variance; it is kept as displayed because a_n and Y_i are defined by it.
    const double exact_var = second - mean * mean;
    const double inflation = static_cast<double>(pairs) / static_cast<double>(pairs - 1);
    if (pairs > 1) EXPECT_NEAR(exact_var * inflation, dm.sigma2, 1e-9 * std::max(1.0, dm.sigma2));
  }
}

TEST(HypergeomLogTail, KnownValues) {
  EXPECT_EQ(hypergeom::log_tail({10, 4, 3}, 0).log(), 0.0);
  EXPECT_TRUE(hypergeom::log_tail({10, 4, 3}, 4).is_zero());
  EXPECT_NEAR(hypergeom::log_tail({10, 4, 3}, 2).log(), std::log(0.3 + 4.0 / 120.0), 1e-14);
}

TEST(HypergeomLogTail, MatchesBoostComplementOnBothSidesOfTheMode) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Params p = random_params(gen, 300);
    const auto law = boost_law(p);
    for (int64_t t = p.support_min() + 1; t <= p.support_max(); ++t) {
      const double expect =
          std::log(boost::math::cdf(boost::math::complement(law, static_cast<unsigned>(t - 1))));
      if (expect < -600 || !std::isfinite(expect)) continue;
      EXPECT_NEAR(hypergeom::log_tail(p, t).log(), expect, 1e-9 * std::max(1.0, std::fabs(expect)))
          << p.population << " " << p.successes << " " << p.draws << " t=" << t;
    }
  }
}

TEST(HypergeomLogTail, DeepTailStaysFinite) {
  const Params p{449985000, 29999, 16400000};
  const double log_tail = hypergeom::log_tail(p, 1500).log();
  EXPECT_TRUE(std::isfinite(log_tail));
  const double expect = std::log(boost::math::cdf(boost::math::complement(boost_law(p), 1499u)));
  EXPECT_NEAR(log_tail, expect, 1e-9 * std::fabs(expect));
  EXPECT_GE(log_tail, hypergeom::log_pmf(p, 1500).log());
  // Far beyond double range in linear scale.
  const double deeper = hypergeom::log_tail(p, 5000).log();
  EXPECT_TRUE(std::isfinite(deeper));
  EXPECT_LT(deeper, -700.0);
}

TEST(HypergeomSample, DegenerateInstances) {
  Rng rng = make_stream(1, "hg-degenerate", 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(hypergeom::sample({10, 0, 5}, rng), 0);
    EXPECT_EQ(hypergeom::sample({10, 10, 4}, rng), 4);
    EXPECT_EQ(hypergeom::sample({10, 4, 0}, rng), 0);
  }
}

TEST(HypergeomSample, ChiSquareOnTenInstances) {
  const std::vector<Params> cases = {{10, 4, 3},        {20, 10, 10},       {100, 3, 50},      {1000, 999, 400},
                                     {5000, 100, 2500}, {60, 59, 1},        {400, 120, 37},    {449985000, 29999, 16400000},
                                     {1000000, 10000, 500000}, {7, 3, 6}};
  for (size_t c = 0; c < cases.size(); ++c) {
    const Params& p = cases[c];
    Rng rng = make_stream(2, "hg-chi-square", c);
    const int64_t lo = p.support_min();
    std::vector<double> observed(static_cast<size_t>(p.support_max() - lo + 1), 0.0);
    for (int i = 0; i < 1'000'000; ++i) observed[static_cast<size_t>(hypergeom::sample(p, rng) - lo)] += 1;
    std::vector<double> prob(observed.size());
    for (size_t i = 0; i < prob.size(); ++i) prob[i] = hypergeom::log_pmf(p, lo + static_cast<int64_t>(i)).linear();
    EXPECT_GT(starlab::testing::chi_square_p(observed, prob), 1e-3) << "instance " << c;
  }
}

TEST(DegreeMoments, KnownValues) {
  const auto dm = hypergeom::degree_moments(1000, 50000);
  EXPECT_EQ(dm.mu, 100.0);
  // sigma^2 = (n-1) p (1-p) N/(N-1) (N-(n-1))/(N-1), in 50-digit arithmetic.
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big N = Big(499500), m = Big(50000), n1 = Big(999);
  const Big p = m / N;
  const Big expect = n1 * p * (1 - p) * (N / (N - 1)) * ((N - n1) / (N - 1));
  EXPECT_NEAR(dm.sigma2, expect.convert_to<double>(), 1e-12);
  EXPECT_NEAR(dm.sigma2, 89.81, 0.005);
  const auto single = hypergeom::degree_moments(2, 1);
  EXPECT_EQ(single.mu, 1.0);
  EXPECT_EQ(single.sigma2, 0.0);
  EXPECT_THROW(hypergeom::degree_moments(10, 46), ParameterError);
  EXPECT_THROW(hypergeom::degree_moments(10, 0), ParameterError);
}

TEST(TiltedTailGaussian, KnownValues) {
  EXPECT_EQ(hypergeom::tilted_tail_gaussian(0.0, 0.0), 0.5);
  EXPECT_EQ(hypergeom::tilted_tail_gaussian(2.0, 2.0), 0.5);
  const double z975 = boost::math::quantile(boost::math::normal_distribution<double>(), 0.975);
  EXPECT_NEAR(z975, 1.959964, 1e-6);
  EXPECT_NEAR(hypergeom::tilted_tail_gaussian(0.0, 1.959964), 0.025, 1e-8);
}

// Exact tilted tail sum_{x >= t} e^{lambda (x - mu)} pmf(x) / sum_x e^{lambda (x - mu)} pmf(x).
double exact_tilted_tail(const Params& p, double a, int64_t t) {
  const double mu = p.mean();
  const double sigma = std::sqrt(p.variance());
  const double lambda = a / sigma;
  LogSumExpAccumulator all, upper;
  for (int64_t x = p.support_min(); x <= p.support_max(); ++x) {
    const double w = hypergeom::log_pmf(p, x).log() + lambda * (static_cast<double>(x) - mu);
    all.add(w);
    if (x >= t) upper.add(w);
  }
  return std::exp(upper.result() - all.result());
}

TEST(TiltedTailGaussian, ExactTiltedTailWithinTenPercent) {
  // Population 10^6 with 10^4 successes and half the population drawn:
  // sigma = 49.7. With 10^3 successes sigma^2 <= 250 and sigma >= 30 cannot hold.
  const Params p{1'000'000, 10'000, 500'000};
  const double mu = p.mean();
  const double sigma = std::sqrt(p.variance());
  ASSERT_GE(sigma, 30.0);
  for (double a : {0.0, 1.0, 2.0}) {
    const auto t_lo = static_cast<int64_t>(std::ceil(mu + (a - 2.0) * sigma));
    const auto t_hi = static_cast<int64_t>(std::floor(mu + (a + 2.0) * sigma));
    for (int64_t t = t_lo; t <= t_hi; ++t) {
      const double exact = exact_tilted_tail(p, a, t);
      const double approx = hypergeom::tilted_tail_gaussian(a, (static_cast<double>(t) - mu) / sigma);
      EXPECT_NEAR(approx / exact, 1.0, 0.10) << "a=" << a << " t=" << t;
    }
  }
}

TEST(ExactCumulants, StandardizationAndClosedFormSkewKurtosis) {
  const std::vector<Params> cases = {{10, 4, 3}, {100, 50, 50}, {60, 7, 20}, {449, 30, 200}};
  for (const auto& p : cases) {
    const auto k = hypergeom::exact_cumulants(p, 4);
    ASSERT_EQ(k.size(), 4u);
    EXPECT_NEAR(k[0], 0.0, 1e-9);
    EXPECT_NEAR(k[1], 1.0, 1e-9);
    const auto law = boost_law(p);
    EXPECT_NEAR(k[2], boost::math::skewness(law), 1e-9);
    // Boost's closed-form hypergeometric kurtosis disagrees with its own pmf,
    // so the fourth cumulant is checked against moments of the Boost pmf.
    double mean = 0.0, m2 = 0.0, m4 = 0.0;
    for (int64_t x = p.support_min(); x <= p.support_max(); ++x) mean += static_cast<double>(x) * boost::math::pdf(law, static_cast<unsigned>(x));
    for (int64_t x = p.support_min(); x <= p.support_max(); ++x) {
      const double w = boost::math::pdf(law, static_cast<unsigned>(x));
      const double c = static_cast<double>(x) - mean;
      m2 += w * c * c;
      m4 += w * c * c * c * c;
    }
    EXPECT_NEAR(k[3], m4 / (m2 * m2) - 3.0, 1e-9);
  }
  EXPECT_NEAR(hypergeom::exact_cumulants({100, 50, 50}, 3)[2], 0.0, 1e-12);
  EXPECT_NEAR(hypergeom::exact_cumulants({10, 4, 3}, 4)[3], -19.0 / 49.0, 1e-12);
  EXPECT_THROW(hypergeom::exact_cumulants({10, 4, 3}, 9), ParameterError);
  EXPECT_THROW(hypergeom::exact_cumulants({10, 0, 3}, 3), ParameterError);
  EXPECT_THROW(hypergeom::exact_cumulants({10'000'000, 5'000'000, 5'000'000}, 3), CapacityError);
}

TEST(StirlingCumulantBound, HandExpansions) {
  EXPECT_EQ(hypergeom::stirling_second_kind_row(3), (std::vector<double>{0, 1, 3, 1}));
  EXPECT_EQ(hypergeom::stirling_second_kind_row(4), (std::vector<double>{0, 1, 7, 6, 1}));
  EXPECT_DOUBLE_EQ(hypergeom::stirling_cumulant_bound(3, 2.0), 12.0 / 2.0);
  EXPECT_DOUBLE_EQ(hypergeom::stirling_cumulant_bound(4, 3.0), 52.0 / 9.0);
  for (int r = 3; r <= 8; ++r) {
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma : {1.0, 10.0, 1e3, 1e6}) {
      const double b = hypergeom::stirling_cumulant_bound(r, sigma);
      EXPECT_LT(b, prev);
      prev = b;
    }
    EXPECT_LT(prev, 1e-4);
  }
  EXPECT_THROW(hypergeom::stirling_cumulant_bound(2, 1.0), ParameterError);
  EXPECT_THROW(hypergeom::stirling_cumulant_bound(3, 0.0), ParameterError);
}

TEST(StirlingCumulantBound, BoundsExactCumulants) {
  std::mt19937_64 gen(15);
  int checked = 0;
  while (checked < 50) {
    const Params p = random_params(gen, 3000);
    if (p.variance() < 4.0) continue;
    const auto k = hypergeom::exact_cumulants(p, 6);
    const double sigma = std::sqrt(p.variance());
    for (int r = 3; r <= 6; ++r) {
      EXPECT_LE(std::fabs(k[static_cast<size_t>(r - 1)]), hypergeom::stirling_cumulant_bound(r, sigma))
          << "r=" << r << " " << p.population << " " << p.successes << " " << p.draws;
    }
    ++checked;
  }
}

TEST(PgfRealRooted, KnownValues) {
  EXPECT_EQ(hypergeom::pgf_real_rooted({10, 4, 3}), std::optional<bool>(true));
  EXPECT_EQ(hypergeom::pgf_real_rooted({6, 3, 2}), std::optional<bool>(true));
  EXPECT_EQ(hypergeom::pgf_real_rooted({5, 5, 3}), std::nullopt);
  EXPECT_EQ(hypergeom::pgf_real_rooted({5, 0, 3}), std::nullopt);
  EXPECT_EQ(hypergeom::pgf_real_rooted({5, 2, 0}), std::nullopt);
  EXPECT_THROW(hypergeom::pgf_real_rooted({400, 200, 200}), CapacityError);
}

TEST(PgfRealRooted, RandomizedSweep) {
  std::mt19937_64 gen(16);
  int checked = 0;
  while (checked < 200) {
    Params p = random_params(gen, 150);
    if (p.successes == 0 || p.successes == p.population || p.draws == 0 || p.draws == p.population) continue;
    if (p.support_max() - p.support_min() > 64) continue;
    EXPECT_EQ(hypergeom::pgf_real_rooted(p), std::optional<bool>(true))
        << p.population << " " << p.successes << " " << p.draws;
    ++checked;
  }
}

TEST(BinomialTailDml, FormulaAndMillsBracket) {
  const int64_t n = 1'000'000;
  const double sd = std::sqrt(250000.0);
  const auto approx = hypergeom::binomial_tail_dml(n, 0.5, 3.0 * sd);
  EXPECT_DOUBLE_EQ(approx.x, 3.0);
  EXPECT_NEAR(approx.probability, std::exp(-4.5) / (3.0 * std::sqrt(2.0 * M_PI)), 1e-16);
  EXPECT_FALSE(approx.outside_validity);
  // The leading Mills-ratio term overstates the tail by a factor in
  // [1, 1/(1 - 1/x^2)]; at x = 3 that is up to 12.5%, so the exact tail is
  // checked against that bracket with a small discreteness allowance.
  const boost::math::binomial_distribution<double> law(static_cast<double>(n), 0.5);
  const double exact = boost::math::cdf(boost::math::complement(law, 500000.0 + 3.0 * sd - 1.0));
  EXPECT_LE(exact, approx.probability * 1.01);
  EXPECT_GE(exact, approx.probability * (1.0 - 1.0 / 9.0) * 0.99);
}

TEST(BinomialTailDml, ValidityFlags) {
  EXPECT_TRUE(hypergeom::binomial_tail_dml(100, 0.5, 5.0).outside_validity);  // x = 1
  EXPECT_TRUE(hypergeom::binomial_tail_dml(4'000'000, 0.5, 10.0 * 1000.0).outside_validity);  // x = 10 = var^{1/6}
  EXPECT_FALSE(hypergeom::binomial_tail_dml(4'000'000, 0.5, 5.0 * 1000.0).outside_validity);
  EXPECT_THROW(hypergeom::binomial_tail_dml(100, 0.0, 1.0), ParameterError);
  EXPECT_THROW(hypergeom::binomial_tail_dml(100, 0.5, 0.0), ParameterError);
}

}  // namespace
