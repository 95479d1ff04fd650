#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "lingrank/ranking.h"
#include "lingrank/simcore.h"
#include "lingrank/subspace.h"
#include "lingrank/synth.h"

namespace {

using namespace lingrank;

void BM_PairLayerSimilarity(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const std::vector<std::uint32_t> layers{5};
  const auto block = synth::gen_pair_block({"en-xx", "en", "xx", 1000, d, layers, 0.5, 0.01, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(simcore::pair_layer_similarity(block, layers, 5));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PairLayerSimilarity)->Arg(64)->Arg(1024)->Arg(4096);

void BM_CommonOrderSublist(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = "l" + std::to_string(i);
  auto b = a;
  std::shuffle(b.begin(), b.end(), std::mt19937_64(3));
  for (auto _ : state) benchmark::DoNotOptimize(ranking::common_order_sublist(a, b));
}
BENCHMARK(BM_CommonOrderSublist)->Arg(18)->Arg(1000)->Arg(100000);

void BM_EigenTop10(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto cloud = synth::gen_gaussian_cloud({2 * d, d, std::vector<double>(d, 1.0), 5});
  const auto c = subspace::covariance(subspace::center(cloud).data);
  subspace::EigenOptions opts;
  opts.assume_psd = true;
  for (auto _ : state) benchmark::DoNotOptimize(subspace::eigen_spectrum(c, 10, opts));
}
BENCHMARK(BM_EigenTop10)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
