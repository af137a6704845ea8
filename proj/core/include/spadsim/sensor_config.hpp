#pragma once

#include <cstdint>
#include <vector>

#include "spadsim/dcr_model.hpp"
#include "spadsim/gate_profile.hpp"
#include "spadsim/pixel_maps.hpp"

namespace spadsim {

/// Static description of the sensor: array geometry, per-pixel gate maps,
/// detection efficiency, dark counts, crosstalk, counter depth and timing.
struct SensorConfig {
  int width = 0;
  int height = 0;
  PixelMaps maps;          ///< per-pixel gate position and length
  GateProfile gate;        ///< nominal profile; rise/fall shared by all pixels
  double pdp_efficiency = 1.0;
  std::vector<float> dcr_cps;  ///< per-pixel dark count rate
  DcrTemperatureParams dcr_temperature;
  double crosstalk_p = 0.0;  ///< per neighbor per avalanche
  int n_sat = 4080;          ///< counter full scale per accumulated image
  double laser_period_ns = 25.0;
  double frame_exposure_ns = 1e9 / 24000.0;  ///< reference frame exposure

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  double dcr_at(std::size_t pixel) const { return dcr_cps[pixel]; }

  /// The pixel's own gate: position and length from the maps, rise and fall
  /// from the nominal profile.
  GateProfile pixel_gate(std::size_t pixel) const {
    return GateProfile(maps.position_ns[pixel], maps.length_ns[pixel],
                       gate.rise_ns, gate.fall_ns);
  }

  void validate() const;

  /// Clean uniform sensor: zero-skew maps at the gate position, no dark
  /// counts, no crosstalk. Starting point for tests and synthetic runs.
  static SensorConfig basic(int width, int height);
};

}  // namespace spadsim
