#pragma once

#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spadsim/pixel_maps.hpp"
#include "spadsim/scan.hpp"

namespace spadsim {

/// L = c * dt / 2. Throws for negative delay.
double delay_to_distance(double delay_ns);

/// Centered moving average with an odd window; edges shrink the window
/// symmetrically so output length equals input length.
IntensityProfile smooth_profile(const IntensityProfile& profile, int window);
std::vector<double> smooth_values(std::span<const double> values, int window);

/// Rising-edge time of a profile: the plateau is the median of the top
/// quartile of counts; returns the position of the first crossing of half the
/// plateau, linearly interpolated. nullopt if the plateau is below the floor.
std::optional<double> detect_rising_edge(const IntensityProfile& profile,
                                         double amplitude_floor);

inline constexpr int kDefaultVirtualWindow = 60;
inline constexpr double kDefaultEdgeSensitivity = 3.0;

/// Multi-edge detection over non-overlapping virtual windows of vwindow
/// samples. A window declares an edge when its last-quarter mean exceeds its
/// first-quarter mean by sensitivity * noise (noise floored at the Poisson
/// sqrt of the first-quarter mean); the edge time comes from the
/// half-amplitude crossing above the window's own baseline. Ascending result.
std::vector<double> detect_multi_edges(const IntensityProfile& profile,
                                       int vwindow = kDefaultVirtualWindow,
                                       double sensitivity = kDefaultEdgeSensitivity,
                                       double amplitude_floor = 0.0);

/// Per-pixel delays; absent entries mean no detection.
struct DelayMap {
  int width = 0;
  int height = 0;
  std::vector<double> delay_ns;
  std::vector<uint8_t> detected;

  static DelayMap empty(int width, int height) {
    DelayMap m;
    m.width = width;
    m.height = height;
    m.delay_ns.assign(static_cast<std::size_t>(width) * height, 0.0);
    m.detected.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
  }
};

/// Subtracts each pixel's gate-position offset from the array median.
/// Undetected entries pass through untouched.
DelayMap compensate_skew(const DelayMap& delays, const PixelMaps& maps);

/// Per-pixel distances; detected flags mark valid entries.
struct DepthMap {
  int width = 0;
  int height = 0;
  double lsb_m = 0.0;  ///< c * scan step / 2
  std::vector<float> distance_m;
  std::vector<uint8_t> detected;
};

/// Absolute time reference of the reconstruction: the array-median gate
/// half-rise point. Subtracting it converts edge positions to round-trip
/// delays.
double gate_time_zero_ns(const PixelMaps& maps, const GateProfile& gate);

struct ReconstructOptions {
  int smooth_window = 15;
  int vwindow = kDefaultVirtualWindow;
  double sensitivity = kDefaultEdgeSensitivity;
  double amplitude_floor = 10.0;
  /// Absolute anchor override; NaN chooses gate_time_zero_ns(maps, gate).
  double time_zero_ns = std::numeric_limits<double>::quiet_NaN();
  int threads = 0;
};

/// Single-edge depth reconstruction: linearity-correct (for binary stacks),
/// smooth, detect the rising edge, compensate skew, subtract the time zero,
/// convert to distance.
DepthMap build_depth_map(const ProfileStack& stack, const PixelMaps& maps,
                         const GateProfile& gate,
                         const ReconstructOptions& options = {});

/// Multi-object reconstruction: detect_multi_edges per pixel, then each
/// non-overlapping ascending range window takes the first detected distance
/// inside it (or stays empty).
std::vector<DepthMap> build_depth_maps(
    const ProfileStack& stack, const PixelMaps& maps, const GateProfile& gate,
    std::span<const std::pair<double, double>> ranges_m,
    const ReconstructOptions& options = {});

}  // namespace spadsim
