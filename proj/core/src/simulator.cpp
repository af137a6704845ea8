#include "spadsim/simulator.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "spadsim/parallel.hpp"
#include "spadsim/rng.hpp"

namespace spadsim {

double detection_probability(double mu) {
  if (mu < 0.0)
    throw std::invalid_argument("detection_probability: mu must be >= 0");
  return -std::expm1(-mu);
}

double frame_mu(const Scene& scene, const SensorConfig& config, std::size_t pixel,
                double gate_position_ns) {
  if (pixel >= config.pixel_count())
    throw std::invalid_argument("frame_mu: pixel out of range");
  // The pixel's gate is anchored at its own map position; the commanded scan
  // position shifts where each return lands on it. A return exactly inside
  // the gate contributes its full amplitude.
  const GateProfile gate = config.pixel_gate(pixel);
  double signal = 0.0;
  for (const auto& r : scene.returns_at(pixel))
    signal += r.amplitude * gate.transmission(gate_position_ns - r.delay_ns);
  signal *= config.pdp_efficiency;
  const double ambient = scene.ambient_per_ns * gate.open_area_ns();
  const double dark = config.dcr_at(pixel) * config.frame_exposure_ns * 1e-9;
  return signal + ambient + dark;
}

std::size_t BinaryFrame::popcount() const {
  std::size_t n = 0;
  for (uint8_t b : bytes) n += std::popcount(b);
  return n;
}

namespace {

void check_dims(const Scene& scene, const SensorConfig& config) {
  config.validate();
  scene.validate();
  if (scene.width != config.width || scene.height != config.height)
    throw std::invalid_argument("scene and sensor dimensions differ");
}

// Per-pixel detection probabilities for one exposure scaling.
std::vector<double> probability_map(const Scene& scene, const SensorConfig& config,
                                    double gate_position_ns, double exposure_scale,
                                    int threads) {
  const std::size_t n = config.pixel_count();
  std::vector<double> p(n);
  parallel_for(
      0, n,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t px = lo; px < hi; ++px)
          p[px] = detection_probability(
              exposure_scale * frame_mu(scene, config, px, gate_position_ns));
      },
      threads);
  return p;
}

std::vector<double> mu_map(const Scene& scene, const SensorConfig& config,
                           double gate_position_ns, int threads) {
  const std::size_t n = config.pixel_count();
  std::vector<double> mu(n);
  parallel_for(
      0, n,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t px = lo; px < hi; ++px)
          mu[px] = frame_mu(scene, config, px, gate_position_ns);
      },
      threads);
  return mu;
}

// Primary detection pass, then one crosstalk generation. Neighbor draws come
// from the firing pixel's stream (draws 1..4), so the result is independent
// of scheduling; bit writes go through atomic OR.
void fill_frame(BinaryFrame& frame, const std::vector<double>& p,
                const SensorConfig& config, uint32_t frame_index, uint64_t seed,
                int threads) {
  const int w = config.width, h = config.height;
  parallel_for(
      0, static_cast<std::size_t>(h),
      [&](std::size_t ylo, std::size_t yhi) {
        for (std::size_t y = ylo; y < yhi; ++y)
          for (int x = 0; x < w; ++x) {
            const std::size_t px = y * w + x;
            if (first_uniform(seed, px, frame_index) < p[px])
              frame.set(x, static_cast<int>(y));
          }
      },
      threads);

  if (config.crosstalk_p <= 0.0) return;

  BinaryFrame primary = frame;
  parallel_for(
      0, static_cast<std::size_t>(h),
      [&](std::size_t ylo, std::size_t yhi) {
        for (std::size_t y = ylo; y < yhi; ++y)
          for (int x = 0; x < w; ++x) {
            if (!primary.get(x, static_cast<int>(y))) continue;
            const std::size_t px = y * w + x;
            RandomStream rng(seed, px, frame_index);
            rng.uniform();  // detection draw already consumed
            const int nx[4] = {x, x + 1, x, x - 1};
            const int ny[4] = {static_cast<int>(y) - 1, static_cast<int>(y),
                               static_cast<int>(y) + 1, static_cast<int>(y)};
            for (int k = 0; k < 4; ++k) {
              const bool fire = rng.uniform() < config.crosstalk_p;
              if (!fire || nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h)
                continue;
              const std::size_t byte =
                  static_cast<std::size_t>(ny[k]) * frame.row_bytes() + nx[k] / 8;
              std::atomic_ref<uint8_t> cell(frame.bytes[byte]);
              cell.fetch_or(static_cast<uint8_t>(1u << (7 - nx[k] % 8)),
                            std::memory_order_relaxed);
            }
          }
      },
      threads);
}

}  // namespace

BinaryFrame simulate_binary_frame(const Scene& scene, const SensorConfig& config,
                                  double gate_position_ns, uint32_t frame_index,
                                  uint64_t seed, const SimOptions& options) {
  check_dims(scene, config);
  BinaryFrame frame = BinaryFrame::zeros(config.width, config.height);
  const auto p = probability_map(scene, config, gate_position_ns, 1.0,
                                 options.threads);
  fill_frame(frame, p, config, options.frame_index_offset + frame_index, seed,
             options.threads);
  return frame;
}

IntensityImage accumulate_frames(const Scene& scene, const SensorConfig& config,
                                 double gate_position_ns,
                                 const ExposureSchedule& schedule, uint64_t seed,
                                 const SimOptions& options) {
  check_dims(scene, config);
  schedule.validate();
  if (schedule.frames > config.n_sat)
    throw CapacityError(
        "accumulate_frames: schedule.frames exceeds the n_sat counter capacity");

  IntensityImage image = IntensityImage::zeros(config.width, config.height);
  const std::size_t n = config.pixel_count();

  if (options.mode == SamplingMode::expected) {
    const auto mu = mu_map(scene, config, gate_position_ns, options.threads);
    double scale_sum = 0.0;
    for (int f = 0; f < schedule.frames; ++f)
      scale_sum += schedule.frame_exposure_ns(f) / config.frame_exposure_ns;
    for (std::size_t px = 0; px < n; ++px) image.counts[px] = mu[px] * scale_sum;
    return image;
  }

  // Exposure classes: single mode has one probability map, dual has two.
  const double ref = config.frame_exposure_ns;
  std::vector<double> p_even = probability_map(
      scene, config, gate_position_ns, schedule.frame_exposure_ns(0) / ref,
      options.threads);
  std::vector<double> p_odd;
  if (schedule.mode == ExposureSchedule::Mode::dual)
    p_odd = probability_map(scene, config, gate_position_ns,
                            schedule.frame_exposure_ns(1) / ref, options.threads);

  if (config.crosstalk_p <= 0.0) {
    // No cross-pixel coupling: accumulate pixel-major. Draws stay keyed by
    // (pixel, frame), so this is bit-identical to the frame-major path.
    parallel_for(
        0, n,
        [&](std::size_t lo, std::size_t hi) {
          for (std::size_t px = lo; px < hi; ++px) {
            const double pe = p_even[px];
            const double po = p_odd.empty() ? pe : p_odd[px];
            uint32_t count = 0;
            for (int f = 0; f < schedule.frames; ++f) {
              const double p = (f % 2 == 0) ? pe : po;
              const uint32_t frame_index = options.frame_index_offset + f;
              if (first_uniform(seed, px, frame_index) < p) ++count;
            }
            image.counts[px] = count;
          }
        },
        options.threads);
    return image;
  }

  BinaryFrame frame = BinaryFrame::zeros(config.width, config.height);
  for (int f = 0; f < schedule.frames; ++f) {
    std::fill(frame.bytes.begin(), frame.bytes.end(), uint8_t{0});
    const auto& p = (f % 2 == 0 || p_odd.empty()) ? p_even : p_odd;
    fill_frame(frame, p, config, options.frame_index_offset + f, seed,
               options.threads);
    parallel_for(
        0, static_cast<std::size_t>(config.height),
        [&](std::size_t ylo, std::size_t yhi) {
          for (std::size_t y = ylo; y < yhi; ++y)
            for (int x = 0; x < config.width; ++x)
              if (frame.get(x, static_cast<int>(y)))
                image.counts[y * config.width + x] += 1.0;
        },
        options.threads);
  }
  return image;
}

AvalancheCounts avalanche_event_counts(const Scene& scene,
                                       const SensorConfig& config,
                                       double gate_position_ns, PixelModel model,
                                       int frames, uint64_t seed,
                                       const SimOptions& options) {
  check_dims(scene, config);
  if (frames < 1)
    throw std::invalid_argument("avalanche_event_counts: frames must be >= 1");

  const auto mu = mu_map(scene, config, gate_position_ns, options.threads);
  const std::size_t n = config.pixel_count();
  AvalancheCounts out{IntensityImage::zeros(config.width, config.height),
                      IntensityImage::zeros(config.width, config.height)};
  parallel_for(
      0, n,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t px = lo; px < hi; ++px) {
          double avalanches = 0.0;
          double detections = 0.0;
          for (int f = 0; f < frames; ++f) {
            RandomStream rng(seed, px,
                             options.frame_index_offset + static_cast<uint32_t>(f));
            const long arrivals = rng.poisson(mu[px]);
            if (arrivals > 0) detections += 1.0;
            // Pixel B's feedback loop closes the recharge path after the
            // first detection; pixel A keeps retriggering.
            avalanches += model == PixelModel::A
                              ? static_cast<double>(arrivals)
                              : static_cast<double>(arrivals > 0 ? 1 : 0);
          }
          out.mean_avalanches_per_frame.counts[px] = avalanches / frames;
          out.detected.counts[px] = detections;
        }
      },
      options.threads);
  return out;
}

}  // namespace spadsim
