#include "spadsim/sensor_config.hpp"

#include <stdexcept>

namespace spadsim {

void SensorConfig::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("SensorConfig: width and height must be positive");
  maps.validate();
  if (maps.width != width || maps.height != height)
    throw std::invalid_argument("SensorConfig: maps dimensions mismatch");
  if (pdp_efficiency < 0.0 || pdp_efficiency > 1.0)
    throw std::invalid_argument("SensorConfig: pdp_efficiency must be in [0, 1]");
  if (dcr_cps.size() != pixel_count())
    throw std::invalid_argument("SensorConfig: dcr map size mismatch");
  for (float d : dcr_cps) {
    if (d < 0.0f)
      throw std::invalid_argument("SensorConfig: dcr must be >= 0");
  }
  if (crosstalk_p < 0.0 || crosstalk_p >= 0.25)
    throw std::invalid_argument("SensorConfig: crosstalk_p must be in [0, 0.25)");
  if (n_sat < 1)
    throw std::invalid_argument("SensorConfig: n_sat must be >= 1");
  if (!(laser_period_ns > 0.0))
    throw std::invalid_argument("SensorConfig: laser_period_ns must be > 0");
  if (!(frame_exposure_ns > 0.0))
    throw std::invalid_argument("SensorConfig: frame_exposure_ns must be > 0");
}

SensorConfig SensorConfig::basic(int width, int height) {
  SensorConfig c;
  c.width = width;
  c.height = height;
  c.gate = GateProfile(0.0, 3.8, 0.55, 0.55);
  c.maps = PixelMaps::constant(width, height, c.gate.position_ns, c.gate.length_ns);
  c.dcr_cps.assign(c.pixel_count(), 0.0f);
  c.validate();
  return c;
}

}  // namespace spadsim
