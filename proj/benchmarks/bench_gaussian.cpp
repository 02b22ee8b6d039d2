#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "wepadim/gaussian.hpp"
#include "wepadim/metrics.hpp"
#include "wepadim/rng.hpp"

namespace {

using namespace wepadim;

std::vector<EmbeddingMap> embeddings(std::size_t n, ImageSize grid, std::size_t dims, std::uint64_t seed) {
  ChannelLayout layout;
  for (std::size_t c = 0; c < dims; ++c) layout.push_back({"x", std::nullopt, c});
  Rng rng(seed);
  std::vector<EmbeddingMap> out;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor t = Tensor::zeros({dims, grid.height, grid.width});
    for (auto& v : t.values()) v = rng.normal();
    out.push_back({std::move(t), layout, grid});
  }
  return out;
}

constexpr ImageSize kGrid{14, 14};

void BM_Accumulate(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  const auto batch = embeddings(8, kGrid, dims, 1);
  for (auto _ : state) {
    MomentAccumulator acc(kGrid, dims);
    acc.add_all(batch, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_Accumulate)->ArgsProduct({{64, 168, 448}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Finalize(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  MomentAccumulator acc(kGrid, dims);
  acc.add_all(embeddings(16, kGrid, dims, 2), 1);
  for (auto _ : state) {
    PatchGaussians g = finalize(acc, 0.01, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_Finalize)->ArgsProduct({{64, 168, 448}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Mahalanobis(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  MomentAccumulator acc(kGrid, dims);
  acc.add_all(embeddings(16, kGrid, dims, 3), 1);
  const PatchGaussians g = finalize(acc, 0.01);
  const EmbeddingMap probe = embeddings(1, kGrid, dims, 4).front();
  for (auto _ : state) {
    Tensor m = mahalanobis_map(g, probe, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_Mahalanobis)->ArgsProduct({{64, 168, 448}, {1, 4}})->Unit(benchmark::kMicrosecond)->UseRealTime();

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  Rng rng(5);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<std::uint8_t>(i % 7 == 0);
    scores[i] = rng.normal() + labels[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(8)->Range(1 << 10, 1 << 22)->Unit(benchmark::kMillisecond);

}  // namespace
