#pragma once

#include <cstdint>

#include "starlab/rng.hpp"

// Random energy model partition function Z = sum_j exp(-beta H_j) with
// H_j i.i.d. N(0, variance), in the parametrization that mirrors the
// likelihood ratio: n_energies = n, variance = ln n, beta = 1 / sqrt(2c).
namespace starlab::rem {

struct RemParams {
  int64_t n_energies = 1;
  double variance = 0.0;
  double beta = 0.0;
  double c = 0.0;  // +inf when beta = 0
  bool graph_mapping = false;

  /// n_energies = n, variance = ln n, beta = 1/sqrt(2c); c = +inf gives beta = 0.
  static RemParams from_graph(int64_t n, double c);
  static RemParams custom(int64_t n_energies, double variance, double beta);

  void validate() const;
  /// log E[Z] = ln n_energies + beta^2 variance / 2.
  double log_mean_partition() const;
};

/// log Z for one draw of the energies, accumulated in log domain.
double rem_partition(const RemParams& params, Rng& rng);

/// Z / E[Z] for one draw. Requires the graph mapping.
double rem_normalized(const RemParams& params, Rng& rng);

}  // namespace starlab::rem
