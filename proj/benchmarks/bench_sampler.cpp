#include "leaftree/sampler.hpp"

#include <benchmark/benchmark.h>

using namespace leaftree;

namespace {

void BM_SampleHeight(benchmark::State& state) {
  const SplitKernel k = state.range(0) == 0 ? SplitKernel::bst() : SplitKernel::binomial(0.5);
  const auto strategy = state.range(1) == 0 ? SplitStrategy::cdf_row : SplitStrategy::specialized;
  const int n = static_cast<int>(state.range(2));
  Rng rng = make_rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_height(k, n, rng, strategy));
  state.SetItemsProcessed(state.iterations() * n);
  state.SetLabel(k.label() + (state.range(1) == 0 ? " cdf-row" : " specialized"));
}
BENCHMARK(BM_SampleHeight)->ArgsProduct({{0, 1}, {0, 1}, {1000, 100000}});

void BM_SampleUniform(benchmark::State& state) {
  const SplitKernel k = SplitKernel::uniform();
  const int n = static_cast<int>(state.range(0));
  Rng rng = make_rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_tree(k, n, rng));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleUniform)->Arg(1000)->Arg(4000);

void BM_Remy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng = make_rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_uniform_remy(n, rng));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Remy)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
