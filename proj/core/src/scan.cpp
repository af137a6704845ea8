#include "spadsim/scan.hpp"

#include <cmath>
#include <stdexcept>

namespace spadsim {

std::vector<double> ScanPlan::positions() const {
  validate();
  std::vector<double> p(count);
  for (int i = 0; i < count; ++i) p[i] = start_ns + i * step_ns;
  return p;
}

void ScanPlan::validate() const {
  if (!(step_ns > 0.0)) throw std::invalid_argument("ScanPlan: step must be > 0");
  if (count < 2) throw std::invalid_argument("ScanPlan: count must be >= 2");
  if (frames_per_position < 1)
    throw std::invalid_argument("ScanPlan: frames_per_position must be >= 1");
}

ScanPlan ScanPlan::from_range(double start_ns, double stop_ns, double step_ns,
                              int frames_per_position) {
  if (!(step_ns > 0.0) || !(stop_ns > start_ns))
    throw std::invalid_argument("ScanPlan: invalid range");
  ScanPlan plan;
  plan.start_ns = start_ns;
  plan.step_ns = step_ns;
  plan.count = static_cast<int>(std::round((stop_ns - start_ns) / step_ns)) + 1;
  plan.frames_per_position = frames_per_position;
  plan.validate();
  return plan;
}

IntensityProfile ProfileStack::profile_at(std::size_t pixel) const {
  IntensityProfile p;
  p.positions_ns = positions_ns;
  p.counts.resize(position_count());
  const std::size_t base = pixel * position_count();
  for (std::size_t i = 0; i < position_count(); ++i)
    p.counts[i] = counts[base + i];
  return p;
}

void ProfileStack::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("ProfileStack: dimensions must be positive");
  if (positions_ns.size() < 2)
    throw std::invalid_argument("ProfileStack: need at least 2 positions");
  if (counts.size() != pixel_count() * position_count())
    throw std::invalid_argument("ProfileStack: counts size mismatch");
}

ProfileStack scan_gate(const Scene& scene, const SensorConfig& config,
                       const ScanPlan& plan, uint64_t seed,
                       const SimOptions& options) {
  plan.validate();
  if (plan.frames_per_position > config.n_sat)
    throw CapacityError(
        "scan_gate: frames_per_position exceeds the n_sat counter capacity");

  ProfileStack stack;
  stack.width = config.width;
  stack.height = config.height;
  stack.positions_ns = plan.positions();
  stack.frames_per_position = plan.frames_per_position;
  stack.linear_expectation = options.mode == SamplingMode::expected;
  stack.counts.assign(stack.pixel_count() * stack.position_count(), 0.0f);

  const auto schedule = ExposureSchedule::single(plan.frames_per_position,
                                                 config.frame_exposure_ns);
  const std::size_t npos = stack.position_count();
  for (std::size_t i = 0; i < npos; ++i) {
    SimOptions opts = options;
    // Key every (position, frame) pair to a distinct frame index.
    opts.frame_index_offset =
        options.frame_index_offset +
        static_cast<uint32_t>(i) * static_cast<uint32_t>(plan.frames_per_position);
    const IntensityImage img = accumulate_frames(
        scene, config, stack.positions_ns[i], schedule, seed, opts);
    for (std::size_t px = 0; px < stack.pixel_count(); ++px)
      stack.counts[px * npos + i] = static_cast<float>(img.counts[px]);
  }
  return stack;
}

}  // namespace spadsim
