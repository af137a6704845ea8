#pragma once

#include <filesystem>

#include "spadsim/dcr_model.hpp"
#include "spadsim/scene.hpp"
#include "spadsim/sensor_config.hpp"

namespace spadsim {

/// Generating parameters of a sensor, as stored in the config file. Building
/// is deterministic, so a saved and reloaded spec reproduces the sensor
/// bit-for-bit.
struct ConfigSpec {
  int width = 64;
  int height = 64;
  double pdp_efficiency = 1.0;
  double crosstalk_p = 0.0039;
  int n_sat = 4080;
  double laser_period_ns = 25.0;
  double frame_exposure_ns = 1e9 / 24000.0;

  GateProfile gate{0.0, 3.8, 0.55, 0.55};
  SkewMapParams skew;  ///< base position defaults to the gate position
  uint64_t map_seed = 1;

  double dcr_median_cps = 2.0;
  bool dcr_spread = false;  ///< constant map, or the two-population model
  DcrPopulationParams dcr_population;
  uint64_t dcr_seed = 2;
  DcrTemperatureParams dcr_temperature;  ///< built from the fields below
  double dcr_reference_kelvin = 293.15;
  double dcr_tunneling_floor_cps = 1.0;
  double dcr_diffusion_at_reference_cps = 1.0;
  double dcr_activation_energy_ev = 1.1;

  SensorConfig build() const;
};

ConfigSpec load_config_spec(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ConfigSpec& spec);

/// Parses and validates a sensor config, building the per-pixel maps.
SensorConfig load_config(const std::filesystem::path& path);

SceneSpec load_scene_spec(const std::filesystem::path& path);
void save_scene(const std::filesystem::path& path, const SceneSpec& spec);

/// Parses a scene file and rasterizes its primitives to the sensor grid.
Scene load_scene(const std::filesystem::path& path, int width, int height);

}  // namespace spadsim
