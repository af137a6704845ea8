#pragma once

#include <cmath>
#include <stdexcept>

namespace spadsim {

/// Frame exposure schedule: one fixed exposure, or alternating short/long
/// exposures (short first) merged into a single accumulated image.
struct ExposureSchedule {
  enum class Mode { single, dual };

  Mode mode = Mode::single;
  int frames = 1;
  double tau_m_ns = 0.0;  ///< single mode
  double tau_s_ns = 0.0;  ///< dual mode, odd frames (first, third, ...)
  double tau_l_ns = 0.0;  ///< dual mode, even frames

  static ExposureSchedule single(int frames, double tau_m_ns) {
    ExposureSchedule s;
    s.mode = Mode::single;
    s.frames = frames;
    s.tau_m_ns = tau_m_ns;
    s.validate();
    return s;
  }

  static ExposureSchedule dual(int frames, double tau_s_ns, double tau_l_ns) {
    ExposureSchedule s;
    s.mode = Mode::dual;
    s.frames = frames;
    s.tau_s_ns = tau_s_ns;
    s.tau_l_ns = tau_l_ns;
    s.validate();
    return s;
  }

  double frame_exposure_ns(int frame_index) const {
    if (mode == Mode::single) return tau_m_ns;
    return frame_index % 2 == 0 ? tau_s_ns : tau_l_ns;
  }

  double mean_exposure_ns() const {
    return mode == Mode::single ? tau_m_ns : 0.5 * (tau_s_ns + tau_l_ns);
  }

  /// Equal-total-exposure check against a single-mode exposure:
  /// 2 * tau_m = tau_s + tau_l.
  bool balanced_with(double single_tau_m_ns, double rel_tol = 1e-9) const {
    return std::fabs(2.0 * single_tau_m_ns - (tau_s_ns + tau_l_ns)) <=
           rel_tol * std::fabs(2.0 * single_tau_m_ns);
  }

  void validate() const {
    if (frames < 1)
      throw std::invalid_argument("ExposureSchedule: frames must be >= 1");
    if (mode == Mode::single) {
      if (!(tau_m_ns > 0.0))
        throw std::invalid_argument("ExposureSchedule: tau_m must be > 0");
    } else {
      if (!(tau_s_ns > 0.0) || !(tau_l_ns > 0.0))
        throw std::invalid_argument("ExposureSchedule: tau_s and tau_l must be > 0");
    }
  }
};

}  // namespace spadsim
