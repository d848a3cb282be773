// Serial reference vs OpenMP replicate runner, and the row-wise degree
// sampler vs the sort/dedup reference sampler.

#include <benchmark/benchmark.h>

#include <vector>

#include "starlab/graph_models.hpp"
#include "starlab/lrt.hpp"
#include "starlab/parallel.hpp"

namespace {

using namespace starlab;

graph::ModelParams window(int64_t n, int64_t k) { return graph::ModelParams::from_gamma(n, k, 0.0); }

double replicate(const graph::ModelParams& p, int64_t r) {
  Rng rng = make_stream(1, "bench", static_cast<uint64_t>(r));
  return lrt::log_lr_exact(graph::sample_null_degrees(p, rng), p).log();
}

void BM_ReplicatesSerial(benchmark::State& state) {
  const auto p = window(state.range(0), 20);
  const int64_t reps = 64;
  std::vector<double> out(reps);
  for (auto _ : state) {
    parallel::for_each_replicate_serial(reps, [&](int64_t r) { out[static_cast<size_t>(r)] = replicate(p, r); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * reps);
}

void BM_ReplicatesOpenMP(benchmark::State& state) {
  const auto p = window(state.range(0), 20);
  const int64_t reps = 64;
  std::vector<double> out(reps);
  for (auto _ : state) {
    parallel::for_each_replicate(reps, 0, [&](int64_t r) { out[static_cast<size_t>(r)] = replicate(p, r); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * reps);
  state.counters["threads"] = parallel::resolve_threads(0);
}

void BM_NullDegreesRowwise(benchmark::State& state) {
  const auto p = window(state.range(0), 20);
  Rng rng = make_stream(2, "bench-rowwise", 0);
  for (auto _ : state) benchmark::DoNotOptimize(graph::sample_null_degrees(p, rng).degrees.data());
  state.counters["m"] = static_cast<double>(p.m);
}

void BM_NullDegreesReference(benchmark::State& state) {
  const auto p = window(state.range(0), 20);
  Rng rng = make_stream(2, "bench-reference", 0);
  for (auto _ : state) benchmark::DoNotOptimize(graph::sample_null_degrees_reference(p, rng).degrees.data());
  state.counters["m"] = static_cast<double>(p.m);
}

void BM_LogLrExact(benchmark::State& state) {
  const auto p = window(state.range(0), 20);
  Rng rng = make_stream(3, "bench-lr", 0);
  const auto deg = graph::sample_null_degrees(p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lrt::log_lr_exact(deg, p).log());
}

BENCHMARK(BM_ReplicatesSerial)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesOpenMP)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NullDegreesRowwise)->Arg(1000)->Arg(3000)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NullDegreesReference)->Arg(1000)->Arg(3000)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogLrExact)->Arg(1000)->Arg(30000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
