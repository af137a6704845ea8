#include "spadsim/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spadsim/constants.hpp"
#include "spadsim/parallel.hpp"

namespace spadsim {

double delay_to_distance(double delay_ns) {
  if (delay_ns < 0.0)
    throw std::invalid_argument("delay_to_distance: delay must be >= 0");
  return 0.5 * kSpeedOfLight_m_per_s * delay_ns * 1e-9;
}

std::vector<double> smooth_values(std::span<const double> values, int window) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("smooth_values: window must be odd and >= 1");
  if (static_cast<std::size_t>(window) > values.size())
    throw std::invalid_argument("smooth_values: window exceeds profile length");
  const std::size_t n = values.size();
  std::vector<double> out(n);
  const long half = window / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const long reach = std::min<long>(
        half, std::min<long>(static_cast<long>(i),
                             static_cast<long>(n - 1 - i)));
    double sum = 0.0;
    for (long k = -reach; k <= reach; ++k) sum += values[i + k];
    out[i] = sum / static_cast<double>(2 * reach + 1);
  }
  return out;
}

IntensityProfile smooth_profile(const IntensityProfile& profile, int window) {
  profile.validate();
  IntensityProfile out;
  out.positions_ns = profile.positions_ns;
  out.counts = smooth_values(profile.counts, window);
  return out;
}

namespace {

// Median of the top quartile; plateau amplitude estimate robust to partial
// plateaus as long as they fill half the quartile.
double plateau_estimate(std::span<const double> counts) {
  const std::size_t n = counts.size();
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  std::vector<double> top(counts.begin(), counts.end());
  std::nth_element(top.begin(), top.begin() + (q - 1), top.end(),
                   std::greater<double>());
  std::vector<double> quart(top.begin(), top.begin() + q);
  std::nth_element(quart.begin(), quart.begin() + q / 2, quart.end());
  return quart[q / 2];
}

// First crossing of `level` scanning left to right, linearly interpolated.
std::optional<double> first_crossing(std::span<const double> positions,
                                     std::span<const double> counts,
                                     double level) {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] >= level) {
      if (i == 0) return positions[0];
      const double c0 = counts[i - 1], c1 = counts[i];
      const double t = (level - c0) / (c1 - c0);
      return positions[i - 1] + t * (positions[i] - positions[i - 1]);
    }
  }
  return std::nullopt;
}

std::optional<double> detect_edge_span(std::span<const double> positions,
                                       std::span<const double> counts,
                                       double baseline, double amplitude_floor) {
  const double plateau = plateau_estimate(counts);
  const double relative = plateau - baseline;
  if (relative <= 0.0 || relative < amplitude_floor) return std::nullopt;
  return first_crossing(positions, counts, baseline + 0.5 * relative);
}

}  // namespace

std::optional<double> detect_rising_edge(const IntensityProfile& profile,
                                         double amplitude_floor) {
  profile.validate();
  if (amplitude_floor < 0.0)
    throw std::invalid_argument("detect_rising_edge: floor must be >= 0");
  return detect_edge_span(profile.positions_ns, profile.counts, 0.0,
                          amplitude_floor);
}

std::vector<double> detect_multi_edges(const IntensityProfile& profile,
                                       int vwindow, double sensitivity,
                                       double amplitude_floor) {
  profile.validate();
  if (vwindow < 8)
    throw std::invalid_argument("detect_multi_edges: vwindow must be >= 8");
  if (static_cast<std::size_t>(vwindow) > profile.size())
    throw std::invalid_argument("detect_multi_edges: vwindow exceeds profile");
  if (amplitude_floor < 0.0)
    throw std::invalid_argument("detect_multi_edges: floor must be >= 0");

  const std::size_t n = profile.size();
  std::vector<double> edges;
  std::size_t w0 = 0;
  while (w0 < n) {
    std::size_t w1 = w0 + vwindow;
    if (w1 > n) {
      // Final partial window; keep it when the quartile statistics still
      // make sense.
      if (n - w0 < 8) break;
      w1 = n;
    }
    const std::span<const double> counts(profile.counts.data() + w0, w1 - w0);
    const std::span<const double> positions(profile.positions_ns.data() + w0,
                                            w1 - w0);
    const std::size_t q = counts.size() / 4;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      m1 += counts[i];
      m2 += counts[counts.size() - q + i];
    }
    m1 /= q;
    m2 /= q;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      s1 += (counts[i] - m1) * (counts[i] - m1);
      const double d2 = counts[counts.size() - q + i] - m2;
      s2 += d2 * d2;
    }
    s1 = std::sqrt(s1 / q);
    s2 = std::sqrt(s2 / q);
    // An edge inside the first quarter inflates its spread; the quieter
    // quarter tracks the background. Poisson floor on the baseline mean.
    const double noise =
        std::max(std::min(s1, s2), std::sqrt(std::max(m1, 0.0)));

    if (m2 - m1 > sensitivity * noise) {
      if (auto edge = detect_edge_span(positions, counts, m1, amplitude_floor))
        edges.push_back(*edge);
    }
    w0 = w1;
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

DelayMap compensate_skew(const DelayMap& delays, const PixelMaps& maps) {
  maps.validate();
  if (delays.width != maps.width || delays.height != maps.height)
    throw std::invalid_argument("compensate_skew: dimension mismatch");
  const double median = maps.median_position_ns();
  DelayMap out = delays;
  for (std::size_t px = 0; px < out.delay_ns.size(); ++px) {
    if (!out.detected[px]) continue;
    out.delay_ns[px] -= maps.position_ns[px] - median;
  }
  return out;
}

double gate_time_zero_ns(const PixelMaps& maps, const GateProfile& gate) {
  return maps.median_position_ns() + 0.5 * gate.rise_ns;
}

namespace {

// Inverts the per-sample saturating response of an accumulated profile:
// counts -> -M ln(1 - counts/M). Saturated samples are clamped just below
// full scale.
void linearize_counts(std::vector<double>& values, double frames) {
  const double cap = frames - 0.25;
  for (double& v : values) {
    const double c = std::min(v, cap);
    v = -frames * std::log1p(-c / frames);
  }
}

struct PixelRecon {
  const ProfileStack& stack;
  const ReconstructOptions& options;

  // Shared scratch is per-call; callers run one instance per thread chunk.
  std::vector<double> values;

  std::vector<double> edges_for(std::size_t px, bool multi) {
    const std::size_t npos = stack.position_count();
    values.assign(stack.counts.begin() + px * npos,
                  stack.counts.begin() + (px + 1) * npos);
    if (!stack.linear_expectation)
      linearize_counts(values, stack.frames_per_position);
    values = smooth_values(values, options.smooth_window);
    IntensityProfile prof;
    prof.positions_ns = stack.positions_ns;
    prof.counts = std::move(values);
    std::vector<double> edges;
    if (multi) {
      edges = detect_multi_edges(prof, options.vwindow, options.sensitivity,
                                 options.amplitude_floor);
    } else if (auto e = detect_rising_edge(prof, options.amplitude_floor)) {
      edges.push_back(*e);
    }
    values = std::move(prof.counts);
    return edges;
  }
};

double resolve_time_zero(const ReconstructOptions& options, const PixelMaps& maps,
                         const GateProfile& gate) {
  return std::isnan(options.time_zero_ns) ? gate_time_zero_ns(maps, gate)
                                          : options.time_zero_ns;
}

}  // namespace

DepthMap build_depth_map(const ProfileStack& stack, const PixelMaps& maps,
                         const GateProfile& gate,
                         const ReconstructOptions& options) {
  stack.validate();
  maps.validate();
  if (maps.width != stack.width || maps.height != stack.height)
    throw std::invalid_argument("build_depth_map: maps dimension mismatch");

  const double median = maps.median_position_ns();
  const double time_zero = resolve_time_zero(options, maps, gate);
  DepthMap map;
  map.width = stack.width;
  map.height = stack.height;
  map.lsb_m = delay_to_distance(stack.positions_ns[1] - stack.positions_ns[0]);
  map.distance_m.assign(stack.pixel_count(), 0.0f);
  map.detected.assign(stack.pixel_count(), 0);

  parallel_for(
      0, stack.pixel_count(),
      [&](std::size_t lo, std::size_t hi) {
        PixelRecon recon{stack, options, {}};
        for (std::size_t px = lo; px < hi; ++px) {
          const auto edges = recon.edges_for(px, /*multi=*/false);
          if (edges.empty()) continue;
          const double skew = maps.position_ns[px] - median;
          const double delay = edges.front() - skew - time_zero;
          if (delay < 0.0) continue;
          map.distance_m[px] = static_cast<float>(delay_to_distance(delay));
          map.detected[px] = 1;
        }
      },
      options.threads);
  return map;
}

std::vector<DepthMap> build_depth_maps(
    const ProfileStack& stack, const PixelMaps& maps, const GateProfile& gate,
    std::span<const std::pair<double, double>> ranges_m,
    const ReconstructOptions& options) {
  stack.validate();
  maps.validate();
  if (maps.width != stack.width || maps.height != stack.height)
    throw std::invalid_argument("build_depth_maps: maps dimension mismatch");
  if (ranges_m.empty())
    throw std::invalid_argument("build_depth_maps: empty range list");
  for (std::size_t i = 0; i < ranges_m.size(); ++i) {
    if (!(ranges_m[i].first < ranges_m[i].second))
      throw std::invalid_argument("build_depth_maps: invalid range");
    if (i > 0 && ranges_m[i].first < ranges_m[i - 1].second)
      throw std::invalid_argument("build_depth_maps: ranges must not overlap");
  }

  const double median = maps.median_position_ns();
  const double time_zero = resolve_time_zero(options, maps, gate);
  const double lsb =
      delay_to_distance(stack.positions_ns[1] - stack.positions_ns[0]);

  std::vector<DepthMap> out(ranges_m.size());
  for (auto& map : out) {
    map.width = stack.width;
    map.height = stack.height;
    map.lsb_m = lsb;
    map.distance_m.assign(stack.pixel_count(), 0.0f);
    map.detected.assign(stack.pixel_count(), 0);
  }

  parallel_for(
      0, stack.pixel_count(),
      [&](std::size_t lo, std::size_t hi) {
        PixelRecon recon{stack, options, {}};
        for (std::size_t px = lo; px < hi; ++px) {
          const auto edges = recon.edges_for(px, /*multi=*/true);
          if (edges.empty()) continue;
          const double skew = maps.position_ns[px] - median;
          for (std::size_t r = 0; r < ranges_m.size(); ++r) {
            for (double edge : edges) {
              const double delay = edge - skew - time_zero;
              if (delay < 0.0) continue;
              const double dist = delay_to_distance(delay);
              if (dist >= ranges_m[r].first && dist < ranges_m[r].second) {
                out[r].distance_m[px] = static_cast<float>(dist);
                out[r].detected[px] = 1;
                break;
              }
            }
          }
        }
      },
      options.threads);
  return out;
}

}  // namespace spadsim
