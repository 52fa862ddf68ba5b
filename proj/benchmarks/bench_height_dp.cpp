#include "leaftree/height_dp.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace leaftree;

namespace {

SplitKernel kernel_for(int id) {
  switch (id) {
    case 0: return SplitKernel::bst();
    case 1: return SplitKernel::uniform();
    default: return SplitKernel::binomial(0.5);
  }
}

void BM_ExpectedHeight(benchmark::State& state) {
  const SplitKernel k = kernel_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  k.row(n);  // warm the row cache
  for (auto _ : state) benchmark::DoNotOptimize(expected_height(k, n).value);
  state.SetLabel(k.label());
}
BENCHMARK(BM_ExpectedHeight)
    ->ArgsProduct({{0, 1, 2}, {100, 500, 2000}})
    ->Unit(benchmark::kMillisecond);

void BM_ExpMoment(benchmark::State& state) {
  const SplitKernel k = kernel_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(exp_moment(k, n, std::numbers::e).log_value);
  state.SetLabel(k.label());
}
BENCHMARK(BM_ExpMoment)->ArgsProduct({{0, 1, 2}, {500, 2000}})->Unit(benchmark::kMillisecond);

void BM_ExhaustiveTable(benchmark::State& state) {
  const SplitKernel k = kernel_for(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const HeightTable t = build_height_table(k, n, {0.0, 1.0, DpOptions{}.max_cells});
    benchmark::DoNotOptimize(t.layers());
  }
  state.SetLabel(k.label());
}
BENCHMARK(BM_ExhaustiveTable)->ArgsProduct({{0, 1, 2}, {1000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
