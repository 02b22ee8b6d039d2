#include <benchmark/benchmark.h>

#include "wepadim/rng.hpp"
#include "wepadim/scoring.hpp"

namespace {

using namespace wepadim;

void BM_GaussianBlur(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double sigma = static_cast<double>(state.range(1));
  Tensor map = Tensor::zeros({n, n});
  Rng rng(11);
  for (auto& v : map.values()) v = rng.normal();
  for (auto _ : state) {
    Tensor out = gaussian_blur(map, sigma);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(map.size()));
}
BENCHMARK(BM_GaussianBlur)->ArgsProduct({{224, 256}, {2, 4, 8}})->Unit(benchmark::kMicrosecond);

void BM_Postprocess(benchmark::State& state) {
  Tensor raw = Tensor::zeros({56, 56});
  Rng rng(12);
  for (auto& v : raw.values()) v = rng.normal();
  for (auto _ : state) {
    AnomalyResult r = postprocess(raw, {224, 224}, 4.0, "bench");
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Postprocess)->Unit(benchmark::kMicrosecond);

}  // namespace
