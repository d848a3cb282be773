#include "starlab/graph_models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "starlab/errors.hpp"
#include "starlab/hypergeom.hpp"

namespace starlab::graph {

namespace {

// Sorted uniform `count`-subset of [0, universe).
std::vector<uint64_t> sample_distinct(uint64_t universe, uint64_t count, Rng& rng) {
  require(count <= universe, "cannot draw " + std::to_string(count) + " distinct values from " +
                                 std::to_string(universe));
  if (count == universe) {
    std::vector<uint64_t> all(universe);
    for (uint64_t i = 0; i < universe; ++i) all[i] = i;
    return all;
  }
  if (count > universe / 2) {
    // Dense request: draw the complement instead.
    const auto skip = sample_distinct(universe, universe - count, rng);
    std::vector<uint64_t> kept;
    kept.reserve(count);
    size_t s = 0;
    for (uint64_t i = 0; i < universe; ++i) {
      if (s < skip.size() && skip[s] == i) {
        ++s;
      } else {
        kept.push_back(i);
      }
    }
    return kept;
  }
  std::vector<uint64_t> codes;
  codes.reserve(count);
  while (codes.size() < count) {
    const size_t have = codes.size();
    const uint64_t need = count - have;
    for (uint64_t i = 0; i < need; ++i) codes.push_back(uniform_below(rng, universe));
    std::sort(codes.begin() + static_cast<std::ptrdiff_t>(have), codes.end());
    std::inplace_merge(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(have), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  }
  return codes;
}

std::vector<uint64_t> merge_sorted(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  std::vector<uint64_t> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

int64_t isqrt_floor(uint64_t x) {
  auto r = static_cast<uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return static_cast<int64_t>(r);
}

WindowResult clamp_window(double raw, int64_t n, int64_t k) {
  WindowResult out;
  out.raw = raw;
  const auto lo = static_cast<double>(k);
  const auto hi = static_cast<double>(pair_count(n));
  if (!(raw >= lo)) {
    out.m = k;
    out.clamped = true;
  } else if (raw > hi) {
    out.m = pair_count(n);
    out.clamped = true;
  } else {
    out.m = std::llround(raw);
    out.m = std::clamp<int64_t>(out.m, k, pair_count(n));
  }
  return out;
}

void check_window_args(int64_t n, int64_t k) {
  require(n >= 3, "window arithmetic needs n >= 3");
  require(k >= 1 && k <= n - 1, "window arithmetic needs 1 <= k <= n - 1");
}

}  // namespace

uint64_t pair_code(int64_t u, int64_t v) {
  require(u != v && u >= 0 && v >= 0, "pair_code needs two distinct nonnegative vertices");
  const auto i = static_cast<uint64_t>(std::min(u, v));
  const auto j = static_cast<uint64_t>(std::max(u, v));
  return j * (j - 1) / 2 + i;
}

Edge decode_pair(uint64_t code) {
  // Largest j with j(j-1)/2 <= code.
  auto j = static_cast<uint64_t>((1 + isqrt_floor(8 * code + 1)) / 2);
  while (j * (j - 1) / 2 > code) --j;
  while ((j + 1) * j / 2 <= code) ++j;
  return Edge{static_cast<int64_t>(code - j * (j - 1) / 2), static_cast<int64_t>(j)};
}

WindowResult m_from_gamma(int64_t n, int64_t k, double gamma) {
  check_window_args(n, k);
  const double log_n = std::log(static_cast<double>(n));
  const double kd = static_cast<double>(k);
  const double raw = kd * kd * static_cast<double>(n) / (4.0 * log_n) * (1.0 + gamma / std::sqrt(log_n));
  return clamp_window(raw, n, k);
}

double gamma_from_m(int64_t n, int64_t k, int64_t m) {
  check_window_args(n, k);
  const double log_n = std::log(static_cast<double>(n));
  const double kd = static_cast<double>(k);
  return (4.0 * static_cast<double>(m) * log_n / (kd * kd * static_cast<double>(n)) - 1.0) *
         std::sqrt(log_n);
}

WindowResult m_from_c(int64_t n, int64_t k, double c) {
  check_window_args(n, k);
  require(c > 0.0, "m_from_c needs c > 0");
  const double kd = static_cast<double>(k);
  const double raw = c * kd * kd * static_cast<double>(n) / std::log(static_cast<double>(n));
  return clamp_window(raw, n, k);
}

ModelParams ModelParams::explicit_m(int64_t n, int64_t m, int64_t k, double alpha) {
  ModelParams p;
  p.n = n;
  p.m = m;
  p.k = k;
  p.alpha = alpha;
  p.window = {Window::Kind::explicit_m, static_cast<double>(m)};
  return p;
}

ModelParams ModelParams::from_gamma(int64_t n, int64_t k, double gamma, double alpha) {
  const auto w = m_from_gamma(n, k, gamma);
  ModelParams p = explicit_m(n, w.m, k, alpha);
  p.window = {Window::Kind::gamma, gamma};
  p.clamped = w.clamped;
  return p;
}

ModelParams ModelParams::from_c(int64_t n, int64_t k, double c, double alpha) {
  const auto w = m_from_c(n, k, c);
  ModelParams p = explicit_m(n, w.m, k, alpha);
  p.window = {Window::Kind::c, c};
  p.clamped = w.clamped;
  return p;
}

void ModelParams::validate_null() const {
  require(n >= 2, "n must be at least 2, got " + std::to_string(n));
  require(m >= 0 && m <= pairs(), "m must lie in [0, n(n-1)/2], got " + std::to_string(m));
  require(alpha > 0.0, "alpha must be positive");
}

void ModelParams::validate() const {
  validate_null();
  require(k >= 1, "k must be at least 1, got " + std::to_string(k));
  require(k <= n - 1, "k must not exceed n - 1, got " + std::to_string(k));
  require(k <= m, "k must not exceed m, got k=" + std::to_string(k) + " m=" + std::to_string(m));
}

int64_t DegreeVector::max() const {
  require(!degrees.empty(), "empty degree vector");
  return *std::max_element(degrees.begin(), degrees.end());
}

void DegreeVector::validate() const {
  int64_t sum = 0;
  const int64_t cap = n() - 1;
  for (int64_t d : degrees) {
    require(d >= 0 && d <= cap, "degree " + std::to_string(d) + " outside [0, n-1]");
    sum += d;
  }
  require(sum == 2 * m, "degree sum " + std::to_string(sum) + " differs from 2m = " + std::to_string(2 * m));
}

std::vector<int64_t> degrees_from_codes(int64_t n, std::span<const uint64_t> codes) {
  std::vector<int64_t> deg(static_cast<size_t>(n), 0);
  for (uint64_t c : codes) {
    const Edge e = decode_pair(c);
    ++deg[static_cast<size_t>(e.u)];
    ++deg[static_cast<size_t>(e.v)];
  }
  return deg;
}

DegreeVector degrees_from_edges(int64_t n, std::span<const Edge> edges, int64_t m) {
  DegreeVector out{std::vector<int64_t>(static_cast<size_t>(n), 0), m};
  for (const auto& e : edges) {
    ++out.degrees[static_cast<size_t>(e.u)];
    ++out.degrees[static_cast<size_t>(e.v)];
  }
  return out;
}

std::vector<uint64_t> sample_null_codes(int64_t n, int64_t m, Rng& rng) {
  require(n >= 2, "n must be at least 2");
  require(m >= 0 && m <= pair_count(n), "m exceeds the number of vertex pairs");
  return sample_distinct(static_cast<uint64_t>(pair_count(n)), static_cast<uint64_t>(m), rng);
}

std::vector<Edge> sample_null_edges(const ModelParams& params, Rng& rng) {
  params.validate_null();
  const auto codes = sample_null_codes(params.n, params.m, rng);
  std::vector<Edge> edges;
  edges.reserve(codes.size());
  for (uint64_t c : codes) edges.push_back(decode_pair(c));
  return edges;
}

std::vector<int64_t> sample_degrees_avoiding(int64_t n, int64_t m, std::span<const uint64_t> excluded,
                                             Rng& rng) {
  const int64_t pairs = pair_count(n);
  const auto available = pairs - static_cast<int64_t>(excluded.size());
  require(m >= 0 && m <= available, "too many edges requested for the available pairs");

  std::vector<int64_t> deg(static_cast<size_t>(n), 0);
  std::vector<uint8_t> taken(static_cast<size_t>(n), 0);
  std::vector<int64_t> touched;

  // Excluded codes are sorted, hence grouped by row in increasing row order.
  auto excl_end = excluded.size();
  int64_t remaining_pop = available;
  int64_t remaining = m;

  for (int64_t row = n - 1; row >= 1 && remaining > 0; --row) {
    // Excluded members of this row sit at the tail of the unconsumed range.
    size_t excl_begin = excl_end;
    while (excl_begin > 0 && decode_pair(excluded[excl_begin - 1]).v == row) --excl_begin;
    const auto row_excluded = static_cast<int64_t>(excl_end - excl_begin);
    const int64_t row_size = row - row_excluded;

    int64_t count = 0;
    if (row_size == remaining_pop) {
      count = remaining;
    } else if (row_size > 0) {
      count = hypergeom::sample({remaining_pop, row_size, remaining}, rng);
    }
    remaining_pop -= row_size;
    remaining -= count;

    for (size_t e = excl_begin; e < excl_end; ++e) {
      taken[static_cast<size_t>(decode_pair(excluded[e]).u)] = 1;
    }

    if (count > 0) {
      deg[static_cast<size_t>(row)] += count;
      const auto bound = static_cast<uint64_t>(row);
      if (2 * count <= row_size) {
        touched.clear();
        for (int64_t drawn = 0; drawn < count;) {
          const auto i = static_cast<size_t>(uniform_below(rng, bound));
          if (taken[i]) continue;
          taken[i] = 1;
          ++deg[i];
          touched.push_back(static_cast<int64_t>(i));
          ++drawn;
        }
        for (int64_t i : touched) taken[static_cast<size_t>(i)] = 0;
      } else {
        // Dense row: pick the non-members and credit everyone else.
        for (int64_t skipped = 0; skipped < row_size - count;) {
          const auto i = static_cast<size_t>(uniform_below(rng, bound));
          if (taken[i]) continue;
          taken[i] = 1;
          ++skipped;
        }
        for (int64_t i = 0; i < row; ++i) {
          if (!taken[static_cast<size_t>(i)]) ++deg[static_cast<size_t>(i)];
          taken[static_cast<size_t>(i)] = 0;
        }
      }
    }
    for (size_t e = excl_begin; e < excl_end; ++e) {
      taken[static_cast<size_t>(decode_pair(excluded[e]).u)] = 0;
    }
    excl_end = excl_begin;
  }
  return deg;
}

DegreeVector sample_null_degrees(const ModelParams& params, Rng& rng) {
  params.validate_null();
  return DegreeVector{sample_degrees_avoiding(params.n, params.m, {}, rng), params.m};
}

DegreeVector sample_null_degrees_reference(const ModelParams& params, Rng& rng) {
  params.validate_null();
  const auto codes = sample_null_codes(params.n, params.m, rng);
  return DegreeVector{degrees_from_codes(params.n, codes), params.m};
}

Star sample_star(int64_t n, int64_t k, Rng& rng) {
  require(k >= 1 && k <= n - 1, "star size must lie in [1, n-1]");
  Star star;
  star.hub = static_cast<int64_t>(uniform_below(rng, static_cast<uint64_t>(n)));
  // Floyd's algorithm for a k-subset of the n - 1 other vertices.
  std::unordered_set<int64_t> chosen;
  chosen.reserve(static_cast<size_t>(k) * 2);
  for (int64_t j = n - 1 - k; j < n - 1; ++j) {
    const auto t = static_cast<int64_t>(uniform_below(rng, static_cast<uint64_t>(j + 1)));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  for (int64_t idx : chosen) star.leaves.push_back(idx < star.hub ? idx : idx + 1);
  std::sort(star.leaves.begin(), star.leaves.end());
  for (int64_t leaf : star.leaves) star.codes.push_back(pair_code(star.hub, leaf));
  std::sort(star.codes.begin(), star.codes.end());
  return star;
}

PlantedEdges sample_planted_edges(const ModelParams& params, Rng& rng) {
  params.validate();
  PlantedEdges out;
  out.star = sample_star(params.n, params.k, rng);
  const auto& excluded = out.star.codes;
  const auto ranks = sample_distinct(static_cast<uint64_t>(params.pairs() - params.k),
                                     static_cast<uint64_t>(params.m - params.k), rng);
  // Rank r among non-star pairs -> code, skipping the sorted star codes.
  std::vector<uint64_t> rest;
  rest.reserve(ranks.size());
  size_t skip = 0;
  for (uint64_t r : ranks) {
    while (skip < excluded.size() && excluded[skip] <= r + skip) ++skip;
    rest.push_back(r + skip);
  }
  out.codes = merge_sorted(excluded, rest);
  return out;
}

PlantedSample sample_planted(const ModelParams& params, Rng& rng) {
  params.validate();
  PlantedSample out;
  Star star = sample_star(params.n, params.k, rng);
  auto deg = sample_degrees_avoiding(params.n, params.m - params.k, star.codes, rng);
  deg[static_cast<size_t>(star.hub)] += params.k;
  for (int64_t leaf : star.leaves) ++deg[static_cast<size_t>(leaf)];
  out.degrees = DegreeVector{std::move(deg), params.m};
  out.hub = star.hub;
  out.leaves = std::move(star.leaves);
  return out;
}

CoupledEdges sample_coupled_edges(const ModelParams& params, Rng& rng) {
  params.validate();
  CoupledEdges out;
  out.star = sample_star(params.n, params.k, rng);
  out.null_codes = sample_null_codes(params.n, params.m, rng);

  // Under the permutation, the first m codes form the null graph and arrive
  // in uniformly random order; the first m - k non-star codes therefore lie
  // among them, and are a uniform (m - k)-subset of null \ star.
  std::vector<uint64_t> outside;
  outside.reserve(out.null_codes.size());
  std::set_difference(out.null_codes.begin(), out.null_codes.end(), out.star.codes.begin(),
                      out.star.codes.end(), std::back_inserter(outside));
  const auto keep = static_cast<uint64_t>(params.m - params.k);
  const auto drop = sample_distinct(outside.size(), outside.size() - keep, rng);
  std::vector<uint64_t> kept;
  kept.reserve(keep);
  size_t d = 0;
  for (size_t i = 0; i < outside.size(); ++i) {
    if (d < drop.size() && drop[d] == i) {
      ++d;
    } else {
      kept.push_back(outside[i]);
    }
  }
  out.planted_codes = merge_sorted(out.star.codes, kept);
  return out;
}

PlantedSample sample_coupled(const ModelParams& params, Rng& rng) {
  auto edges = sample_coupled_edges(params, rng);
  PlantedSample out;
  out.degrees = DegreeVector{degrees_from_codes(params.n, edges.planted_codes), params.m};
  out.coupled_null = DegreeVector{degrees_from_codes(params.n, edges.null_codes), params.m};
  out.hub = edges.star.hub;
  out.leaves = std::move(edges.star.leaves);
  return out;
}

int64_t sample_center_degree(const ModelParams& params, Rng& rng) {
  params.validate();
  return params.k +
         hypergeom::sample({params.pairs() - params.k, params.n - 1 - params.k, params.m - params.k}, rng);
}

void write_edges_csv(std::ostream& out, std::span<const Edge> edges) {
  out << "u,v\n";
  for (const auto& e : edges) out << e.u << ',' << e.v << '\n';
}

void write_degrees_csv(std::ostream& out, std::span<const int64_t> degrees) {
  out << "degree\n";
  for (int64_t d : degrees) out << d << '\n';
}

std::vector<int64_t> read_degrees_csv(std::istream& in) {
  std::string line;
  auto strip = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  };
  if (!std::getline(in, line)) throw ParameterError("degrees file is empty");
  strip(line);
  if (line != "degree") throw ParameterError("degrees file must start with header \"degree\"");
  std::vector<int64_t> out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip(line);
    if (line.empty()) continue;
    size_t used = 0;
    int64_t value = 0;
    try {
      value = std::stoll(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size()) {
      throw ParameterError("degrees file line " + std::to_string(line_no) + ": not an integer");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace starlab::graph
