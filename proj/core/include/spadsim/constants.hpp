#pragma once

namespace spadsim {

inline constexpr double kSpeedOfLight_m_per_s = 299792458.0;

/// Boltzmann constant in eV/K (CODATA 2018).
inline constexpr double kBoltzmann_eV_per_K = 8.617333262e-5;

inline constexpr const char* kToolVersion = "spadsim 0.1.0";

}  // namespace spadsim
