#include <benchmark/benchmark.h>

#include "spadsim/rng.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  std::array<uint32_t, 4> ctr{0, 0, 0, 0};
  const std::array<uint32_t, 2> key{0x12345678, 0x9abcdef0};
  for (auto _ : state) {
    ++ctr[3];
    benchmark::DoNotOptimize(spadsim::philox::block(key, ctr));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxBlock);

void BM_FirstUniform(benchmark::State& state) {
  uint64_t pixel = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spadsim::first_uniform(42, ++pixel, 7));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FirstUniform);

void BM_Poisson(benchmark::State& state) {
  const double mu = static_cast<double>(state.range(0));
  spadsim::RandomStream rng(1, 2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.poisson(mu));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Poisson)->Arg(2)->Arg(40)->Arg(400);

}  // namespace
