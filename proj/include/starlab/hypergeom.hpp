#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "starlab/log_value.hpp"
#include "starlab/rng.hpp"

// Hypergeometric and binomial kernels. All probabilities are returned in log
// form; every function is pure apart from the random stream passed to sample().
namespace starlab::hypergeom {

/// Hypergeom(population, successes, draws): successes counted in a sample of
/// `draws` items taken without replacement from `population` items, of which
/// `successes` are marked.
struct Params {
  int64_t population = 0;
  int64_t successes = 0;
  int64_t draws = 0;

  void validate() const;
  int64_t support_min() const;
  int64_t support_max() const;
  int64_t mode() const;
  double mean() const;
  double variance() const;
};

LogValue log_pmf(const Params& params, int64_t x);

/// log P(X >= t), summed exactly from whichever side of the mode t falls on.
LogValue log_tail(const Params& params, int64_t t);

/// Exact draw by inversion, searching outward from the mode.
int64_t sample(const Params& params, Rng& rng);

struct DegreeMoments {
  double mu = 0.0;
  double sigma2 = 0.0;
};

/// Mean and variance of a vertex degree in G(n, m), i.e. of Hypergeom(N, n-1, m).
DegreeMoments degree_moments(int64_t n, int64_t m);

/// Gaussian approximation Phi^c(t - a) of the tail of the standardized
/// hypergeometric tilted by e^{a y}. Valid for a = o(sigma^{1/3}); the regime
/// is the caller's business.
double tilted_tail_gaussian(double a, double t);

/// kappa_1..kappa_{r_max} of (X - mean) / sd from exact moments. Throws
/// CapacityError if the support exceeds one million points.
std::vector<double> exact_cumulants(const Params& params, int r_max);

/// 2 / sigma^{r-2} * sum_{q=1}^{r} (q-1)! S(r, q), the explicit bound on
/// |kappa_r| of a standardized hypergeometric.
double stirling_cumulant_bound(int r, double sigma);

/// Stirling numbers of the second kind S(r, q) for q = 0..r.
std::vector<double> stirling_second_kind_row(int r);

/// Whether the generating polynomial sum_j P(X = lo + j) z^j (lo the support
/// minimum) has only real, strictly negative roots. Decided exactly with a
/// Sturm sequence over the integers. Returns nullopt for the degenerate cases
/// successes in {0, population} or draws in {0, population}. Throws
/// CapacityError above degree 64.
std::optional<bool> pgf_real_rooted(const Params& params);

struct DmlApproximation {
  double probability = 0.0;
  double x = 0.0;
  /// Set when x <= 1 or x >= (np(1-p))^{1/6}.
  bool outside_validity = false;
};

/// DeMoivre-Laplace approximation of P[Bin(n, p) >= np + h].
DmlApproximation binomial_tail_dml(int64_t n, double p, double h);

}  // namespace starlab::hypergeom
