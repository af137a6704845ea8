#pragma once

#include <cstdint>
#include <vector>

namespace spadsim {

/// Per-pixel gate position and gate length, row-major with row 0 at the top
/// of the array.
struct PixelMaps {
  int width = 0;
  int height = 0;
  std::vector<float> position_ns;
  std::vector<float> length_ns;

  std::size_t size() const { return position_ns.size(); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  /// Median of the position map; reference point for skew compensation.
  double median_position_ns() const;
  void validate() const;

  static PixelMaps constant(int width, int height, double position_ns,
                            double length_ns);
};

/// Parameters of the synthetic skew morphology: a vertical gradient (gate
/// later toward the top rows), a horizontal bump active only in the top half,
/// and white per-pixel jitter. Gradient and jitter amplitudes are calibrated
/// so the population FWHMs hit the configured targets.
struct SkewMapParams {
  double base_position_ns = 0.0;
  double nominal_length_ns = 3.8;
  double position_fwhm_ns = 0.0;  ///< target population FWHM; 0 disables skew
  double length_fwhm_ns = 0.0;    ///< target population FWHM; 0 disables spread
  double horizontal_weight = 0.35;  ///< top-half horizontal term, relative
  double jitter_weight = 0.15;      ///< white jitter sigma, relative
};

PixelMaps generate_pixel_maps(int width, int height, const SkewMapParams& params,
                              uint64_t seed);

struct Histogram {
  double origin = 0.0;     ///< left edge of bin 0
  double bin_width = 0.0;
  std::vector<double> counts;

  double center(std::size_t bin) const {
    return origin + (static_cast<double>(bin) + 0.5) * bin_width;
  }
};

/// FWHM of a sample population from its histogram: half-peak threshold
/// crossings with linear interpolation between bin centers. Returns 0 with
/// degenerate=true for a constant population.
struct FwhmEstimate {
  double fwhm = 0.0;
  bool degenerate = false;
  Histogram histogram;
};

FwhmEstimate population_fwhm(const std::vector<float>& values, double bin_width);

struct GateStats {
  double position_fwhm_ns = 0.0;
  double length_fwhm_ns = 0.0;
  bool position_degenerate = false;
  bool length_degenerate = false;
  Histogram position_histogram;
  Histogram length_histogram;
};

/// Default histogram bin width, equal to the 36 ps scan step.
inline constexpr double kDefaultStatsBin_ns = 0.036;

GateStats measure_gate_stats(const PixelMaps& maps,
                             double bin_width_ns = kDefaultStatsBin_ns);

}  // namespace spadsim
