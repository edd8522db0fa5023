// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include "lmpso/rng.hpp"
#include "lmpso/symreg/expr.hpp"
#include "lmpso/symreg/metrics.hpp"
#include "lmpso/tsp/held_karp.hpp"
#include "lmpso/tsp/instance.hpp"

using namespace lmpso;

namespace {

tsp::TspInstance instance(std::size_t n) {
  Rng rng = make_stream(1, "bench.layout", n);
  return tsp::generate_instance(n, rng);
}

symreg::Dataset dataset(std::size_t rows) {
  Rng rng = make_stream(1, "bench.dataset");
  symreg::Dataset d;
  d.dim = 5;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d.dim; ++j) d.X.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53 * 20.0);
    d.y.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
  return d;
}

const char* const kExpr = "log(abs(x0 * x1 - x2)) + sqrt(x3) / (x4 + 1) - max(x0, min(x2, 3.5)) ^ 2";

void BM_HeldKarpSerial(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsp::held_karp_serial(inst).length);
}

void BM_HeldKarpParallel(benchmark::State& state) {
  const auto inst = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tsp::held_karp(inst).length);
}

void BM_FitMetricsSerial(benchmark::State& state) {
  const auto d = dataset(static_cast<std::size_t>(state.range(0)));
  const auto e = symreg::parse_expr(kExpr, 5);
  for (auto _ : state) benchmark::DoNotOptimize(symreg::fit_metrics_serial(e, d).mae);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FitMetricsParallel(benchmark::State& state) {
  const auto d = dataset(static_cast<std::size_t>(state.range(0)));
  const auto e = symreg::parse_expr(kExpr, 5);
  for (auto _ : state) benchmark::DoNotOptimize(symreg::fit_metrics(e, d).mae);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_HeldKarpSerial)->DenseRange(10, 14, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeldKarpParallel)->DenseRange(10, 14, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitMetricsSerial)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FitMetricsParallel)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
