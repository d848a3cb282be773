#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "starlab/rng.hpp"

// Null G(n, m) and planted-star models, their exact samplers, and the
// scaling-window arithmetic that maps (gamma | c) to an edge count.
namespace starlab::graph {

/// Number of unordered vertex pairs, n(n-1)/2.
constexpr int64_t pair_count(int64_t n) { return n * (n - 1) / 2; }

/// Colexicographic pair code j(j-1)/2 + i for i < j. Codes of pairs with
/// larger endpoint j ("row j") form the contiguous block [j(j-1)/2, j(j+1)/2).
uint64_t pair_code(int64_t u, int64_t v);

struct Edge {
  int64_t u = 0;  // u < v
  int64_t v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

Edge decode_pair(uint64_t code);

struct WindowResult {
  int64_t m = 0;
  double raw = 0.0;  // unrounded value of the display
  bool clamped = false;
};

/// m = round(k^2 n / (4 ln n) * (1 + gamma / sqrt(ln n))), clamped to [k, N].
WindowResult m_from_gamma(int64_t n, int64_t k, double gamma);

/// Inverse of m_from_gamma before rounding: (4 m ln n / (k^2 n) - 1) sqrt(ln n).
double gamma_from_m(int64_t n, int64_t k, int64_t m);

/// m = round(c k^2 n / ln n), clamped to [k, N].
WindowResult m_from_c(int64_t n, int64_t k, double c);

struct Window {
  enum class Kind { explicit_m, gamma, c };
  Kind kind = Kind::explicit_m;
  double value = 0.0;
  friend bool operator==(const Window&, const Window&) = default;
};

/// One instance of the testing problem.
struct ModelParams {
  int64_t n = 0;
  int64_t m = 0;
  int64_t k = 1;
  double alpha = 2.0;
  Window window{};
  bool clamped = false;

  static ModelParams explicit_m(int64_t n, int64_t m, int64_t k, double alpha = 2.0);
  static ModelParams from_gamma(int64_t n, int64_t k, double gamma, double alpha = 2.0);
  static ModelParams from_c(int64_t n, int64_t k, double c, double alpha = 2.0);

  int64_t pairs() const { return pair_count(n); }
  double density() const { return static_cast<double>(m) / static_cast<double>(pairs()); }

  /// Null-model checks only (n >= 2, 0 <= m <= N).
  void validate_null() const;
  /// Full invariants: additionally 1 <= k <= min(m, n - 1).
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct DegreeVector {
  std::vector<int64_t> degrees;
  int64_t m = 0;

  int64_t n() const { return static_cast<int64_t>(degrees.size()); }
  int64_t max() const;
  /// Checks the handshake identity and the [0, n-1] range.
  void validate() const;
};

struct PlantedSample {
  DegreeVector degrees;
  int64_t hub = 0;
  std::vector<int64_t> leaves;  // sorted
  std::optional<DegreeVector> coupled_null;
};

DegreeVector degrees_from_edges(int64_t n, std::span<const Edge> edges, int64_t m);

/// Uniform m-subset of the N pairs: draw i.i.d. codes, sort, deduplicate, top
/// up until exactly m distinct codes remain. Returns sorted codes.
std::vector<uint64_t> sample_null_codes(int64_t n, int64_t m, Rng& rng);
std::vector<Edge> sample_null_edges(const ModelParams& params, Rng& rng);

/// Degree vector of a uniform m-edge graph without materializing edges.
DegreeVector sample_null_degrees(const ModelParams& params, Rng& rng);

/// Reference path for sample_null_degrees: sort/dedup edge codes, then count
/// endpoints. Same law, kept for cross-checks and benchmarks.
DegreeVector sample_null_degrees_reference(const ModelParams& params, Rng& rng);

/// Uniform m-subset of the pairs outside `excluded` (sorted, distinct codes)
/// reduced to its degree vector, row by row: row sizes are drawn as a
/// sequential multivariate hypergeometric, then each row's members are drawn
/// uniformly without replacement.
std::vector<int64_t> sample_degrees_avoiding(int64_t n, int64_t m, std::span<const uint64_t> excluded,
                                             Rng& rng);

struct Star {
  int64_t hub = 0;
  std::vector<int64_t> leaves;  // sorted
  std::vector<uint64_t> codes;  // sorted pair codes of the k star edges
};

Star sample_star(int64_t n, int64_t k, Rng& rng);

struct PlantedEdges {
  Star star;
  std::vector<uint64_t> codes;  // all m edges, sorted
};

/// Planted model, edge level: uniform hub, k uniform incident edges, then m - k
/// uniform edges among the N - k remaining pairs.
PlantedEdges sample_planted_edges(const ModelParams& params, Rng& rng);

/// Planted model, degrees only.
PlantedSample sample_planted(const ModelParams& params, Rng& rng);

struct CoupledEdges {
  Star star;
  std::vector<uint64_t> null_codes;     // first m pairs of a uniform permutation
  std::vector<uint64_t> planted_codes;  // star plus first m - k non-star pairs of the same permutation
};

CoupledEdges sample_coupled_edges(const ModelParams& params, Rng& rng);

/// Planted sample together with the null sample sharing its permutation.
PlantedSample sample_coupled(const ModelParams& params, Rng& rng);

/// Degree of the planted hub: k + Hypergeom(N - k, n - 1 - k, m - k).
int64_t sample_center_degree(const ModelParams& params, Rng& rng);

std::vector<int64_t> degrees_from_codes(int64_t n, std::span<const uint64_t> codes);

void write_edges_csv(std::ostream& out, std::span<const Edge> edges);
void write_degrees_csv(std::ostream& out, std::span<const int64_t> degrees);
std::vector<int64_t> read_degrees_csv(std::istream& in);

}  // namespace starlab::graph
