#include <benchmark/benchmark.h>

#include "spadsim/simulator.hpp"

namespace {

using namespace spadsim;

void BM_AccumulateFrames(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const int frames = 256;
  auto config = SensorConfig::basic(side, side);
  const auto scene = Scene::uniform(side, side, 0.5, 0.0);
  const auto schedule = ExposureSchedule::single(frames, config.frame_exposure_ns);
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        accumulate_frames(scene, config, 2.175, schedule, ++seed, {}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(side) * side *
                          frames);
}
BENCHMARK(BM_AccumulateFrames)->Arg(32)->Arg(64)->Arg(128)
    ->Unit(benchmark::kMillisecond);

void BM_AccumulateFramesCrosstalk(benchmark::State& state) {
  const int side = 64;
  const int frames = 256;
  auto config = SensorConfig::basic(side, side);
  config.crosstalk_p = 0.0039;
  const auto scene = Scene::uniform(side, side, 0.5, 0.0);
  const auto schedule = ExposureSchedule::single(frames, config.frame_exposure_ns);
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        accumulate_frames(scene, config, 2.175, schedule, ++seed, {}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(side) * side *
                          frames);
}
BENCHMARK(BM_AccumulateFramesCrosstalk)->Unit(benchmark::kMillisecond);

}  // namespace
