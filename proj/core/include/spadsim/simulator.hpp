#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spadsim/exposure.hpp"
#include "spadsim/scene.hpp"
#include "spadsim/sensor_config.hpp"

namespace spadsim {

/// A request exceeds a hard counter capacity (e.g. more frames than n_sat).
struct CapacityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Probability that a pixel fires at least once in a frame with expected
/// arrival count mu: 1 - exp(-mu). Throws for negative mu.
double detection_probability(double mu);

/// Expected counts for one frame at the reference exposure:
/// pdp * sum_i a_i * f(gate_position - dt_i) + ambient * gate open time
/// + dcr * exposure. Scales linearly with exposure duration.
double frame_mu(const Scene& scene, const SensorConfig& config, std::size_t pixel,
                double gate_position_ns);

/// One-bit-per-pixel frame, packed 8 pixels per byte, MSB first, rows padded
/// to whole bytes (the stack file layout).
struct BinaryFrame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bytes;

  std::size_t row_bytes() const { return (static_cast<std::size_t>(width) + 7) / 8; }
  bool get(int x, int y) const {
    const std::size_t i = static_cast<std::size_t>(y) * row_bytes() + x / 8;
    return (bytes[i] >> (7 - x % 8)) & 1;
  }
  void set(int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * row_bytes() + x / 8;
    bytes[i] |= static_cast<uint8_t>(1u << (7 - x % 8));
  }
  static BinaryFrame zeros(int width, int height) {
    BinaryFrame f;
    f.width = width;
    f.height = height;
    f.bytes.assign(static_cast<std::size_t>(f.row_bytes()) * height, 0);
    return f;
  }
  std::size_t popcount() const;
};

/// Per-pixel accumulated counts (or expectations).
struct IntensityImage {
  int width = 0;
  int height = 0;
  std::vector<double> counts;

  static IntensityImage zeros(int width, int height) {
    IntensityImage img;
    img.width = width;
    img.height = height;
    img.counts.assign(static_cast<std::size_t>(width) * height, 0.0);
    return img;
  }
};

enum class SamplingMode {
  binary,    ///< Bernoulli frames, the physical detector
  expected,  ///< linear expectation pass-through (no saturation, no noise)
};

struct SimOptions {
  int threads = 0;  ///< 0 = hardware concurrency
  SamplingMode mode = SamplingMode::binary;
  uint32_t frame_index_offset = 0;  ///< base frame index for stream keying
};

/// One binary frame. Each pixel fires with detection_probability(frame_mu),
/// drawn from the stream keyed (seed, pixel, frame_index); fired pixels then
/// trigger each 4-neighbor once with probability crosstalk_p. Bit-identical
/// for a fixed seed regardless of thread count.
BinaryFrame simulate_binary_frame(const Scene& scene, const SensorConfig& config,
                                  double gate_position_ns, uint32_t frame_index,
                                  uint64_t seed, const SimOptions& options = {});

/// Sum of schedule.frames binary frames. Dual schedules alternate exposures
/// (short first); exposure rescales mu proportionally. Throws if
/// schedule.frames exceeds config.n_sat.
IntensityImage accumulate_frames(const Scene& scene, const SensorConfig& config,
                                 double gate_position_ns,
                                 const ExposureSchedule& schedule, uint64_t seed,
                                 const SimOptions& options = {});

/// Recharge behavior under strong illumination: pixel A retriggers on every
/// arrival, pixel B latches after the first. Detected binary output is
/// identical; only the avalanche count differs.
enum class PixelModel { A, B };

struct AvalancheCounts {
  IntensityImage mean_avalanches_per_frame;
  IntensityImage detected;  ///< accumulated binary counts (same for A and B)
};

AvalancheCounts avalanche_event_counts(const Scene& scene,
                                       const SensorConfig& config,
                                       double gate_position_ns, PixelModel model,
                                       int frames, uint64_t seed,
                                       const SimOptions& options = {});

}  // namespace spadsim
