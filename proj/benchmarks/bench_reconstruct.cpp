#include <benchmark/benchmark.h>

#include "spadsim/deconvolve.hpp"
#include "spadsim/reconstruct.hpp"
#include "spadsim/scan.hpp"

namespace {

using namespace spadsim;

ProfileStack sample_stack(int side) {
  auto config = SensorConfig::basic(side, side);
  const auto scene = Scene::uniform(side, side, 0.5, distance_to_delay_ns(0.6));
  ScanPlan plan;
  plan.start_ns = 0.6;
  plan.step_ns = 0.036;
  plan.count = 176;
  plan.frames_per_position = 64;
  return scan_gate(scene, config, plan, 1, {});
}

void BM_BuildDepthMap(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto stack = sample_stack(side);
  const auto maps = PixelMaps::constant(side, side, 0.0, 3.8);
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_depth_map(stack, maps, gate, {}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(side) * side);
}
BENCHMARK(BM_BuildDepthMap)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DetectMultiEdges(benchmark::State& state) {
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  std::vector<double> positions(351);
  for (int i = 0; i < 351; ++i) positions[i] = i * 0.036;
  const std::vector<Reflection> rets{{100.0, 1.2}, {60.0, 3.4}};
  const auto profile = expected_intensity_profile(rets, gate, positions);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_multi_edges(profile, 60, 3.0, 5.0));
  }
}
BENCHMARK(BM_DetectMultiEdges);

void BM_Deconvolve(benchmark::State& state) {
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  const auto f = sample_gate_kernel(gate, 0.036);
  std::vector<double> g(260, 0.0);
  g[40] = 100.0;
  g[100] = 60.0;
  IntensityProfile h;
  h.positions_ns.resize(g.size());
  h.counts = convolve_delays(g, f);
  for (std::size_t i = 0; i < g.size(); ++i) h.positions_ns[i] = i * 0.036;
  for (auto _ : state) {
    benchmark::DoNotOptimize(deconvolve_profile(h, f, 200));
  }
  state.SetLabel("200 iterations");
}
BENCHMARK(BM_Deconvolve)->Unit(benchmark::kMillisecond);

}  // namespace
