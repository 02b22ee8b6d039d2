#include <benchmark/benchmark.h>

#include "wepadim/dwt.hpp"
#include "wepadim/rng.hpp"
#include "wepadim/wavelet.hpp"

namespace {

using namespace wepadim;

Tensor noise(std::size_t c, std::size_t n, std::uint64_t seed) {
  Tensor t = Tensor::zeros({c, n, n});
  Rng rng(seed);
  for (auto& v : t.values()) v = rng.normal();
  return t;
}

// args: spatial size, filter index, level
void BM_Dwt2d(benchmark::State& state) {
  static const char* names[] = {"haar", "db2", "sym4"};
  const auto n = static_cast<std::size_t>(state.range(0));
  const WaveletFamily family = filter_bank(names[state.range(1)]);
  const int level = static_cast<int>(state.range(2));
  const Tensor input = noise(64, n, 7);
  for (auto _ : state) {
    SubbandPyramid p = dwt2d(input, family, level);
    benchmark::DoNotOptimize(p);
  }
  state.SetLabel(names[state.range(1)]);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(input.size()));
}
BENCHMARK(BM_Dwt2d)->ArgsProduct({{14, 28, 56}, {0, 1, 2}, {1, 2}})->Unit(benchmark::kMicrosecond);

}  // namespace
