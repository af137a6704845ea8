#pragma once

#include <cstdint>
#include <vector>

#include "spadsim/gate_profile.hpp"
#include "spadsim/scene.hpp"
#include "spadsim/sensor_config.hpp"
#include "spadsim/simulator.hpp"

namespace spadsim {

/// Gate scan: count positions starting at start_ns in uniform steps, with a
/// fixed number of accumulated frames per position.
struct ScanPlan {
  double start_ns = 0.6;
  double step_ns = 0.036;
  int count = 351;
  int frames_per_position = 255;

  std::vector<double> positions() const;
  void validate() const;

  /// Plan covering [start, stop] inclusive with the given step.
  static ScanPlan from_range(double start_ns, double stop_ns, double step_ns,
                             int frames_per_position);
};

/// Per-pixel intensity profiles sharing one gate-position grid.
struct ProfileStack {
  int width = 0;
  int height = 0;
  std::vector<double> positions_ns;
  std::vector<float> counts;  ///< [pixel * positions + position_index]
  int frames_per_position = 0;
  bool linear_expectation = false;  ///< true for SamplingMode::expected stacks

  std::size_t position_count() const { return positions_ns.size(); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  IntensityProfile profile_at(std::size_t pixel) const;
  void validate() const;
};

/// Runs the scan: accumulates frames_per_position frames at each gate
/// position through the binary detection model (single exposure at the
/// config's frame exposure). Deterministic per seed.
ProfileStack scan_gate(const Scene& scene, const SensorConfig& config,
                       const ScanPlan& plan, uint64_t seed,
                       const SimOptions& options = {});

}  // namespace spadsim
