#include "spadsim/gate_profile.hpp"

#include <cmath>
#include <stdexcept>

namespace spadsim {

GateProfile::GateProfile(double position, double length, double rise, double fall)
    : position_ns(position), length_ns(length), rise_ns(rise), fall_ns(fall) {
  if (!(length_ns > 0.0))
    throw std::invalid_argument("GateProfile: length_ns must be > 0");
  if (rise_ns < 0.0 || fall_ns < 0.0)
    throw std::invalid_argument("GateProfile: rise_ns and fall_ns must be >= 0");
  if (rise_ns + fall_ns > 2.0 * length_ns)
    throw std::invalid_argument(
        "GateProfile: rise_ns + fall_ns must not exceed 2 * length_ns");
}

double GateProfile::transmission(double t_ns) const {
  const double u = t_ns - position_ns;
  if (u < 0.0) return 0.0;
  // Plateau spans [rise, rise/2 + length - fall/2]; nonnegative because
  // rise + fall <= 2 * length.
  const double plateau_end = 0.5 * rise_ns + length_ns - 0.5 * fall_ns;
  if (u < rise_ns) return u / rise_ns;
  if (u <= plateau_end) return 1.0;
  const double d = u - plateau_end;
  if (d < fall_ns) return 1.0 - d / fall_ns;
  return 0.0;
}

double IntensityProfile::step_ns() const {
  if (positions_ns.size() < 2) return 0.0;
  return positions_ns[1] - positions_ns[0];
}

void IntensityProfile::validate() const {
  if (positions_ns.empty())
    throw std::invalid_argument("IntensityProfile: empty position grid");
  if (positions_ns.size() != counts.size())
    throw std::invalid_argument(
        "IntensityProfile: positions and counts differ in length");
  const double step = step_ns();
  if (positions_ns.size() >= 2 && !(step > 0.0))
    throw std::invalid_argument("IntensityProfile: positions must increase");
  for (std::size_t i = 1; i < positions_ns.size(); ++i) {
    const double d = positions_ns[i] - positions_ns[i - 1];
    if (std::fabs(d - step) > 1e-9 * std::max(1.0, std::fabs(step)))
      throw std::invalid_argument("IntensityProfile: non-uniform position step");
  }
  for (double c : counts) {
    if (c < 0.0 || !std::isfinite(c))
      throw std::invalid_argument("IntensityProfile: counts must be >= 0");
  }
}

IntensityProfile expected_intensity_profile(std::span<const Reflection> returns,
                                            const GateProfile& gate,
                                            std::span<const double> positions_ns) {
  if (positions_ns.empty())
    throw std::invalid_argument("expected_intensity_profile: empty position grid");
  for (const auto& r : returns) {
    if (r.amplitude < 0.0)
      throw std::invalid_argument(
          "expected_intensity_profile: negative return amplitude");
  }
  IntensityProfile out;
  out.positions_ns.assign(positions_ns.begin(), positions_ns.end());
  out.counts.assign(positions_ns.size(), 0.0);
  for (std::size_t i = 0; i < positions_ns.size(); ++i) {
    double sum = 0.0;
    for (const auto& r : returns)
      sum += r.amplitude * gate.transmission(positions_ns[i] - r.delay_ns);
    out.counts[i] = sum;
  }
  out.validate();
  return out;
}

}  // namespace spadsim
