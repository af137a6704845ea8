#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include "spadsim/constants.hpp"
#include "spadsim/dcr_model.hpp"

using namespace spadsim;

TEST_SUITE("dcr") {

TEST_CASE("temperature model") {
  SUBCASE("zero prefactor pins the rate to the floor") {
    DcrTemperatureParams params{1.7, 0.0, 1.1};
    for (double t : {200.0, 250.0, 300.0, 350.0})
      CHECK(dcr_at_temperature(params, t) == doctest::Approx(1.7));
  }

  SUBCASE("Arrhenius ratio matches the closed form") {
    DcrTemperatureParams params;
    params.tunneling_floor_cps = 0.0;
    params.activation_energy_ev = 1.1;
    params.diffusion_prefactor_cps = 1e19;
    const double ratio =
        dcr_at_temperature(params, 303.0) / dcr_at_temperature(params, 293.0);
    const double expect =
        std::exp(1.1 / kBoltzmann_eV_per_K * (1.0 / 293.0 - 1.0 / 303.0));
    CHECK(ratio == doctest::Approx(expect).epsilon(1e-6));
  }

  SUBCASE("calibrated prefactor reproduces the target rate") {
    DcrTemperatureParams params;
    params.tunneling_floor_cps = 1.0;
    params.activation_energy_ev = 1.1;
    params.diffusion_prefactor_cps = diffusion_prefactor_for(1.0, 1.1, 293.15);
    CHECK(dcr_at_temperature(params, 293.15) == doctest::Approx(2.0).epsilon(1e-9));
  }

  SUBCASE("monotone nondecreasing in temperature") {
    DcrTemperatureParams params;
    params.diffusion_prefactor_cps = diffusion_prefactor_for(1.0, 1.1, 293.15);
    double prev = 0.0;
    for (double t = 210.0; t < 360.0; t += 5.0) {
      const double d = dcr_at_temperature(params, t);
      CHECK(d >= prev);
      prev = d;
    }
  }

  SUBCASE("nonpositive temperature rejected") {
    CHECK_THROWS_AS(dcr_at_temperature(DcrTemperatureParams{}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(dcr_at_temperature(DcrTemperatureParams{}, -5.0),
                    std::invalid_argument);
  }
}

TEST_CASE("activation energy fit") {
  const auto synthesize = [](double ea, double floor_cps, double diffusion_ref) {
    DcrTemperatureParams params;
    params.tunneling_floor_cps = floor_cps;
    params.activation_energy_ev = ea;
    params.diffusion_prefactor_cps =
        diffusion_prefactor_for(diffusion_ref, ea, 303.15);
    std::vector<std::pair<double, double>> samples;
    for (double t = 303.15; t <= 343.15; t += 5.0)
      samples.emplace_back(t, dcr_at_temperature(params, t));
    return samples;
  };

  SUBCASE("diffusion activation energy round trip") {
    const auto samples = synthesize(1.1, 0.6, 2.0);
    CHECK(fit_activation_energy(samples, 0.6) ==
          doctest::Approx(1.1).epsilon(1e-6));
  }

  SUBCASE("hot pixel activation energy round trip") {
    const auto samples = synthesize(0.55, 0.0, 40.0);
    CHECK(fit_activation_energy(samples, 0.0) ==
          doctest::Approx(0.55).epsilon(1e-6));
  }

  SUBCASE("temperature independent data fits to zero") {
    std::vector<std::pair<double, double>> samples;
    for (double t = 290.0; t <= 340.0; t += 10.0) samples.emplace_back(t, 5.0);
    CHECK(std::fabs(fit_activation_energy(samples, 0.0)) < 1e-12);
  }

  SUBCASE("samples at or below the floor are rejected") {
    std::vector<std::pair<double, double>> samples{
        {300.0, 1.0}, {310.0, 2.0}, {320.0, 3.0}};
    CHECK_THROWS_AS(fit_activation_energy(samples, 1.0), std::invalid_argument);
  }

  SUBCASE("needs at least three samples") {
    std::vector<std::pair<double, double>> samples{{300.0, 2.0}, {310.0, 3.0}};
    CHECK_THROWS_AS(fit_activation_energy(samples, 0.0), std::invalid_argument);
  }
}

TEST_CASE("population map statistics") {
  DcrPopulationParams params;
  const auto map = generate_dcr_map(128, 128, params, 77);
  REQUIRE(map.cps.size() == 128u * 128u);

  // Median near the configured median (bulk dominates).
  std::vector<float> sorted(map.cps);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  CHECK(sorted[sorted.size() / 2] == doctest::Approx(2.0).epsilon(0.25));

  // Roughly the configured hot fraction carries mixed activation energies.
  std::size_t hot = 0;
  for (float ea : map.activation_ev)
    if (ea < 1.09f) ++hot;
  CHECK(static_cast<double>(hot) / map.activation_ev.size() ==
        doctest::Approx(params.hot_fraction).epsilon(0.15));

  // Deterministic per seed.
  const auto again = generate_dcr_map(128, 128, params, 77);
  CHECK(map.cps == again.cps);
}

}  // TEST_SUITE
