#pragma once

#include <cstdint>

// Scalar special functions shared by the distribution kernels.
namespace starlab::special {

double log_gamma(double x);

/// Stirling-formula remainder: log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirlerr(double n);

/// Deviance term x log(x/np) + np - x, computed without cancellation.
double bd0(double x, double np);

/// log P(Bin(n, p) = x) via Loader's saddle-point decomposition; q = 1 - p.
double log_binomial_pmf(double x, double n, double p, double q);

/// log C(n, k); -inf when k is outside [0, n].
double log_choose(int64_t n, int64_t k);

/// log of the falling factorial (a)_k = a (a-1) ... (a-k+1); -inf when it vanishes.
double log_falling(int64_t a, int64_t k);

/// Upper standard normal tail, 1 - Phi(x).
double normal_sf(double x);

}  // namespace starlab::special
