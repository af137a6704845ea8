#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spadsim {

/// Two-source dark count model: a temperature-independent tunneling floor
/// plus an Arrhenius diffusion term.
struct DcrTemperatureParams {
  double tunneling_floor_cps = 1.0;
  double diffusion_prefactor_cps = 0.0;
  double activation_energy_ev = 1.1;
};

/// dcr(T) = floor + prefactor * exp(-Ea / (kB * T)). Throws for T <= 0.
double dcr_at_temperature(const DcrTemperatureParams& params, double kelvin);

/// Prefactor such that the diffusion term contributes diffusion_cps at the
/// reference temperature.
double diffusion_prefactor_for(double diffusion_cps, double activation_energy_ev,
                               double reference_kelvin);

/// Arrhenius slope fit: least squares of ln(dcr - floor) against 1/T, scaled
/// by -kB. Requires at least 3 samples with dcr above the floor.
double fit_activation_energy(std::span<const std::pair<double, double>> samples,
                             double tunneling_floor_cps = 0.0);

/// Per-pixel DCR population: bulk pixels log-normally spread around the
/// median, a hot tail with larger rates and mixed activation energies.
struct DcrPopulationParams {
  double median_cps = 2.0;
  double lognormal_sigma = 0.5;
  double hot_fraction = 0.2;
  double hot_scale = 20.0;
  double hot_lognormal_sigma = 1.0;
  double bulk_activation_ev = 1.1;
  double hot_activation_ev = 0.55;
};

struct DcrMap {
  std::vector<float> cps;
  std::vector<float> activation_ev;
};

DcrMap generate_dcr_map(int width, int height, const DcrPopulationParams& params,
                        uint64_t seed);

}  // namespace spadsim
