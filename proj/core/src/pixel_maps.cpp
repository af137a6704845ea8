#include "spadsim/pixel_maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spadsim/rng.hpp"

namespace spadsim {

double PixelMaps::median_position_ns() const {
  if (position_ns.empty())
    throw std::invalid_argument("PixelMaps: empty position map");
  std::vector<float> sorted(position_ns);
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  return sorted[mid];
}

void PixelMaps::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("PixelMaps: dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (position_ns.size() != n || length_ns.size() != n)
    throw std::invalid_argument("PixelMaps: map size does not match dimensions");
  for (float l : length_ns) {
    if (!(l > 0.0f))
      throw std::invalid_argument("PixelMaps: gate lengths must be > 0");
  }
}

PixelMaps PixelMaps::constant(int width, int height, double position_ns,
                              double length_ns) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("PixelMaps: dimensions must be positive");
  PixelMaps maps;
  maps.width = width;
  maps.height = height;
  maps.position_ns.assign(static_cast<std::size_t>(width) * height,
                          static_cast<float>(position_ns));
  maps.length_ns.assign(static_cast<std::size_t>(width) * height,
                        static_cast<float>(length_ns));
  maps.validate();
  return maps;
}

namespace {

// Unit-scale deviation shapes. The position shape combines the vertical
// gradient, the top-half horizontal bump, and white jitter; the length shape
// is jitter only. Both are rescaled afterwards to hit the FWHM targets.
std::vector<float> position_shape(int width, int height,
                                  const SkewMapParams& params, uint64_t seed) {
  std::vector<float> dev(static_cast<std::size_t>(width) * height);
  const double hmax = std::max(1, height - 1);
  const double wmax = std::max(1, width - 1);
  for (int y = 0; y < height; ++y) {
    const double r = y / hmax;              // 0 at top row
    const double vertical = 1.0 - r;        // gate activates later at the top
    const double top_fade = std::max(0.0, 1.0 - 2.0 * r);
    for (int x = 0; x < width; ++x) {
      const std::size_t px = static_cast<std::size_t>(y) * width + x;
      const double u = x / wmax;
      const double horizontal = params.horizontal_weight * 4.0 * u * (1.0 - u) * top_fade;
      RandomStream rng(seed, px, 0);
      const double jitter = params.jitter_weight * rng.normal();
      dev[px] = static_cast<float>(vertical + horizontal + jitter);
    }
  }
  return dev;
}

std::vector<float> length_shape(int width, int height, uint64_t seed) {
  std::vector<float> dev(static_cast<std::size_t>(width) * height);
  for (std::size_t px = 0; px < dev.size(); ++px) {
    RandomStream rng(seed, px, 1);
    dev[px] = static_cast<float>(rng.normal());
  }
  return dev;
}

// Scales a unit shape so the population FWHM of base + scale * shape hits the
// target as seen by the default histogram estimator. The estimator is close
// to linear in the scale, so a few fixed-point rounds converge.
std::vector<float> calibrate(const std::vector<float>& shape, double base,
                             double target_fwhm) {
  std::vector<float> out(shape.size());
  if (target_fwhm <= 0.0) {
    std::fill(out.begin(), out.end(), static_cast<float>(base));
    return out;
  }
  double scale = target_fwhm;
  for (int round = 0; round < 8; ++round) {
    for (std::size_t i = 0; i < shape.size(); ++i)
      out[i] = static_cast<float>(base + scale * shape[i]);
    const auto est = population_fwhm(out, kDefaultStatsBin_ns);
    if (est.degenerate || est.fwhm <= 0.0) {
      scale *= 2.0;
      continue;
    }
    const double ratio = target_fwhm / est.fwhm;
    scale *= ratio;
    if (std::fabs(ratio - 1.0) < 0.005) break;
  }
  for (std::size_t i = 0; i < shape.size(); ++i)
    out[i] = static_cast<float>(base + scale * shape[i]);
  return out;
}

}  // namespace

PixelMaps generate_pixel_maps(int width, int height, const SkewMapParams& params,
                              uint64_t seed) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("generate_pixel_maps: dimensions must be positive");
  if (!(params.nominal_length_ns > 0.0))
    throw std::invalid_argument("generate_pixel_maps: nominal_length_ns must be > 0");

  PixelMaps maps;
  maps.width = width;
  maps.height = height;
  maps.position_ns = calibrate(position_shape(width, height, params, seed),
                               params.base_position_ns, params.position_fwhm_ns);
  maps.length_ns = calibrate(length_shape(width, height, seed),
                             params.nominal_length_ns, params.length_fwhm_ns);
  for (float l : maps.length_ns) {
    if (!(l > 0.0f))
      throw std::invalid_argument(
          "generate_pixel_maps: length FWHM too wide for the nominal length");
  }
  maps.validate();
  return maps;
}

FwhmEstimate population_fwhm(const std::vector<float>& values, double bin_width) {
  if (values.empty())
    throw std::invalid_argument("population_fwhm: empty population");
  if (!(bin_width > 0.0))
    throw std::invalid_argument("population_fwhm: bin width must be > 0");

  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;

  FwhmEstimate est;
  if (mx - mn <= 0.0) {
    est.degenerate = true;
    est.histogram.origin = mn - 0.5 * bin_width;
    est.histogram.bin_width = bin_width;
    est.histogram.counts = {static_cast<double>(values.size())};
    return est;
  }

  const std::size_t nbins =
      static_cast<std::size_t>(std::floor((mx - mn) / bin_width)) + 1;
  Histogram hist;
  hist.origin = mn;
  hist.bin_width = bin_width;
  hist.counts.assign(nbins, 0.0);
  for (float v : values) {
    auto bin = static_cast<std::size_t>((v - mn) / bin_width);
    if (bin >= nbins) bin = nbins - 1;
    hist.counts[bin] += 1.0;
  }

  const std::size_t peak_bin = static_cast<std::size_t>(
      std::max_element(hist.counts.begin(), hist.counts.end()) -
      hist.counts.begin());
  const double half = 0.5 * hist.counts[peak_bin];

  // Threshold crossings outward from the peak, interpolated between bin
  // centers (virtual empty bins just outside the range).
  auto count_at = [&](long bin) -> double {
    if (bin < 0 || bin >= static_cast<long>(nbins)) return 0.0;
    return hist.counts[static_cast<std::size_t>(bin)];
  };
  long lo = static_cast<long>(peak_bin);
  while (count_at(lo - 1) >= half) --lo;
  long hi = static_cast<long>(peak_bin);
  while (count_at(hi + 1) >= half) ++hi;

  const double c_lo = count_at(lo), c_lo_prev = count_at(lo - 1);
  const double c_hi = count_at(hi), c_hi_next = count_at(hi + 1);
  const double left = hist.center(static_cast<std::size_t>(std::max(lo, 0L))) -
                      bin_width * (1.0 - (half - c_lo_prev) / (c_lo - c_lo_prev));
  const double right = hist.center(static_cast<std::size_t>(hi)) +
                       bin_width * (1.0 - (half - c_hi_next) / (c_hi - c_hi_next));

  est.fwhm = right - left;
  est.histogram = std::move(hist);
  return est;
}

GateStats measure_gate_stats(const PixelMaps& maps, double bin_width_ns) {
  maps.validate();
  GateStats stats;
  auto pos = population_fwhm(maps.position_ns, bin_width_ns);
  auto len = population_fwhm(maps.length_ns, bin_width_ns);
  stats.position_fwhm_ns = pos.fwhm;
  stats.position_degenerate = pos.degenerate;
  stats.position_histogram = std::move(pos.histogram);
  stats.length_fwhm_ns = len.fwhm;
  stats.length_degenerate = len.degenerate;
  stats.length_histogram = std::move(len.histogram);
  return stats;
}

}  // namespace spadsim
