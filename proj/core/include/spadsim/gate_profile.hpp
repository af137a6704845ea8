#pragma once

#include <span>
#include <vector>

namespace spadsim {

/// Trapezoidal gate transmission window.
///
/// The gate foot sits at position_ns: transmission is 0 before it, ramps to 1
/// over rise_ns, holds the plateau, and ramps back to 0 over fall_ns. The
/// length is the full width at half maximum, so the half-transmission points
/// are position_ns + rise_ns/2 and position_ns + rise_ns/2 + length_ns.
struct GateProfile {
  double position_ns = 0.0;
  double length_ns = 3.8;
  double rise_ns = 0.55;
  double fall_ns = 0.55;

  GateProfile() = default;
  GateProfile(double position, double length, double rise, double fall);

  double transmission(double t_ns) const;

  /// Time at which transmission first reaches 0.5.
  double half_rise_ns() const { return position_ns + 0.5 * rise_ns; }

  /// Integral of the transmission function over time. For a trapezoid with
  /// FWHM anchoring this equals length_ns exactly.
  double open_area_ns() const { return length_ns; }

  /// Time at which transmission returns to 0.
  double end_ns() const {
    return position_ns + 0.5 * rise_ns + length_ns + 0.5 * fall_ns;
  }

  GateProfile shifted(double dt_ns) const {
    return GateProfile(position_ns + dt_ns, length_ns, rise_ns, fall_ns);
  }
};

/// One reflective return: expected detected counts when the return sits on a
/// fully open gate, and its round-trip delay.
struct Reflection {
  double amplitude = 0.0;
  double delay_ns = 0.0;
};

/// Counts sampled over a uniformly spaced grid of gate positions. Counts may
/// be expected values (reals) or measured sums (integers stored as reals).
struct IntensityProfile {
  std::vector<double> positions_ns;
  std::vector<double> counts;

  std::size_t size() const { return positions_ns.size(); }
  double step_ns() const;
  void validate() const;
};

/// Expected intensity profile of a multi-return pixel: for each grid
/// position p, sum of amplitude * f(p - delay) over the returns, with f the
/// gate transmission anchored at its own position. A return on the plateau
/// contributes its full amplitude.
IntensityProfile expected_intensity_profile(std::span<const Reflection> returns,
                                            const GateProfile& gate,
                                            std::span<const double> positions_ns);

}  // namespace spadsim
