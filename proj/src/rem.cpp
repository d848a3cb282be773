#include "starlab/rem.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "starlab/errors.hpp"
#include "starlab/log_value.hpp"

namespace starlab::rem {

RemParams RemParams::from_graph(int64_t n, double c) {
  require(n >= 2, "REM mapping needs n >= 2");
  require(c > 0.0, "REM mapping needs c > 0");
  RemParams p;
  p.n_energies = n;
  p.variance = std::log(static_cast<double>(n));
  p.c = c;
  p.beta = std::isinf(c) ? 0.0 : 1.0 / std::sqrt(2.0 * c);
  p.graph_mapping = true;
  return p;
}

RemParams RemParams::custom(int64_t n_energies, double variance, double beta) {
  RemParams p;
  p.n_energies = n_energies;
  p.variance = variance;
  p.beta = beta;
  p.c = beta > 0.0 ? 1.0 / (2.0 * beta * beta) : std::numeric_limits<double>::infinity();
  p.graph_mapping = false;
  p.validate();
  return p;
}

void RemParams::validate() const {
  require(n_energies >= 1, "REM needs at least one energy level");
  require(variance >= 0.0, "REM energy variance must be nonnegative");
  require(beta >= 0.0, "REM inverse temperature must be nonnegative");
  if (beta > 0.0 && std::isfinite(c)) {
    require(std::fabs(beta - 1.0 / std::sqrt(2.0 * c)) <= 1e-12 * beta, "beta and c disagree");
  }
  if (graph_mapping) {
    require(std::fabs(variance - std::log(static_cast<double>(n_energies))) <= 1e-12 * std::max(1.0, variance),
            "graph mapping requires variance = ln n_energies");
  }
}

double RemParams::log_mean_partition() const {
  return std::log(static_cast<double>(n_energies)) + 0.5 * beta * beta * variance;
}

double rem_partition(const RemParams& params, Rng& rng) {
  params.validate();
  if (params.beta == 0.0) return std::log(static_cast<double>(params.n_energies));
  // Ziggurat normals; roughly twice as fast as std::normal_distribution here.
  boost::random::normal_distribution<double> energy(0.0, std::sqrt(params.variance));
  LogSumExpAccumulator acc;
  for (int64_t j = 0; j < params.n_energies; ++j) acc.add(-params.beta * energy(rng));
  return acc.result();
}

double rem_normalized(const RemParams& params, Rng& rng) {
  require(params.graph_mapping, "Z/E[Z] is only defined here under the graph mapping");
  return std::exp(rem_partition(params, rng) - params.log_mean_partition());
}

}  // namespace starlab::rem
