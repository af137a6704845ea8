#include "spadsim/dcr_model.hpp"

#include <cmath>
#include <stdexcept>

#include "spadsim/constants.hpp"
#include "spadsim/rng.hpp"

namespace spadsim {

double dcr_at_temperature(const DcrTemperatureParams& params, double kelvin) {
  if (!(kelvin > 0.0))
    throw std::invalid_argument("dcr_at_temperature: temperature must be > 0 K");
  if (params.tunneling_floor_cps < 0.0 || params.diffusion_prefactor_cps < 0.0)
    throw std::invalid_argument("dcr_at_temperature: rates must be >= 0");
  return params.tunneling_floor_cps +
         params.diffusion_prefactor_cps *
             std::exp(-params.activation_energy_ev / (kBoltzmann_eV_per_K * kelvin));
}

double diffusion_prefactor_for(double diffusion_cps, double activation_energy_ev,
                               double reference_kelvin) {
  if (!(reference_kelvin > 0.0))
    throw std::invalid_argument("diffusion_prefactor_for: temperature must be > 0 K");
  return diffusion_cps *
         std::exp(activation_energy_ev / (kBoltzmann_eV_per_K * reference_kelvin));
}

double fit_activation_energy(std::span<const std::pair<double, double>> samples,
                             double tunneling_floor_cps) {
  if (samples.size() < 3)
    throw std::invalid_argument("fit_activation_energy: need at least 3 samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [kelvin, dcr] : samples) {
    if (!(kelvin > 0.0))
      throw std::invalid_argument("fit_activation_energy: temperature must be > 0 K");
    if (!(dcr > tunneling_floor_cps))
      throw std::invalid_argument(
          "fit_activation_energy: sample at or below the tunneling floor");
    const double x = 1.0 / kelvin;
    const double y = std::log(dcr - tunneling_floor_cps);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(samples.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw std::invalid_argument("fit_activation_energy: degenerate temperatures");
  const double slope = (n * sxy - sx * sy) / denom;
  return -slope * kBoltzmann_eV_per_K;
}

DcrMap generate_dcr_map(int width, int height, const DcrPopulationParams& params,
                        uint64_t seed) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("generate_dcr_map: dimensions must be positive");
  if (params.median_cps < 0.0 || params.hot_fraction < 0.0 ||
      params.hot_fraction > 1.0)
    throw std::invalid_argument("generate_dcr_map: invalid population parameters");

  const std::size_t n = static_cast<std::size_t>(width) * height;
  DcrMap map;
  map.cps.resize(n);
  map.activation_ev.resize(n);
  for (std::size_t px = 0; px < n; ++px) {
    RandomStream rng(seed, px, 2);
    const bool hot = rng.uniform() < params.hot_fraction;
    if (hot) {
      const double rate = params.median_cps * params.hot_scale *
                          std::exp(params.hot_lognormal_sigma * rng.normal());
      // Hot pixels mix diffusion and generation-recombination sources.
      const double mix = rng.uniform();
      map.cps[px] = static_cast<float>(rate);
      map.activation_ev[px] = static_cast<float>(
          params.hot_activation_ev +
          mix * (params.bulk_activation_ev - params.hot_activation_ev));
    } else {
      const double rate =
          params.median_cps * std::exp(params.lognormal_sigma * rng.normal());
      map.cps[px] = static_cast<float>(rate);
      map.activation_ev[px] = static_cast<float>(params.bulk_activation_ev);
    }
  }
  return map;
}

}  // namespace spadsim
