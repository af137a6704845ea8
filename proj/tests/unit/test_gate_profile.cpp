#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include "spadsim/gate_profile.hpp"
#include "spadsim/rng.hpp"

using namespace spadsim;

namespace {

std::vector<double> grid(double start, double step, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = start + i * step;
  return g;
}

}  // namespace

TEST_SUITE("gate_profile") {

TEST_CASE("trapezoid anchor points") {
  const GateProfile p(2.0, 3.8, 0.55, 0.55);
  CHECK(p.transmission(2.0 + 3.8 / 2.0) == doctest::Approx(1.0));  // plateau
  CHECK(p.transmission(0.0) == 0.0);                               // before foot
  CHECK(p.transmission(p.half_rise_ns()) == doctest::Approx(0.5));
  // FWHM: half-transmission points sit exactly length_ns apart.
  CHECK(p.transmission(p.half_rise_ns() + p.length_ns) == doctest::Approx(0.5));
  CHECK(p.transmission(p.half_rise_ns() + p.length_ns + 1e-6) < 0.5);
  CHECK(p.transmission(p.half_rise_ns() - 1e-6) < 0.5);
}

TEST_CASE("construction rejects bad shapes") {
  CHECK_THROWS_AS(GateProfile(0.0, 0.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GateProfile(0.0, -1.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GateProfile(0.0, 1.0, -0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GateProfile(0.0, 1.0, 1.5, 0.6), std::invalid_argument);
  CHECK_NOTHROW(GateProfile(0.0, 1.0, 1.0, 1.0));  // degenerate triangle
}

TEST_CASE("transmission stays in [0,1] and is continuous") {
  RandomStream rng(11, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const double len = 0.5 + 5.0 * rng.uniform();
    const double rise = 0.05 + 0.9 * len * rng.uniform();
    const double fall = 0.05 + (2.0 * len - rise - 0.05) * rng.uniform() * 0.9;
    const GateProfile p(4.0 * rng.uniform(), len, rise, fall);
    const double t_end = p.end_ns() + 1.0;
    double prev = p.transmission(-1.0);
    const double dt = 1e-3;
    const double max_slope = 1.0 / std::min(rise, fall);
    for (double t = -1.0; t < t_end; t += dt) {
      const double v = p.transmission(t);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(std::fabs(v - prev) <= max_slope * dt + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("single return is a shifted scaled trapezoid") {
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  const auto positions = grid(-1.0, 0.036, 200);
  const Reflection ret{100.0, 0.0};
  const auto h = expected_intensity_profile({&ret, 1}, gate, positions);
  for (std::size_t i = 0; i < positions.size(); ++i)
    CHECK(h.counts[i] ==
          doctest::Approx(100.0 * gate.transmission(positions[i])).epsilon(1e-12));
}

TEST_CASE("two returns form a two-step rising profile") {
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  const auto positions = grid(0.0, 0.036, 351);
  const std::vector<Reflection> rets{{100.0, 1.0}, {60.0, 4.0}};
  const auto h = expected_intensity_profile(rets, gate, positions);
  // Sum of the two shifted trapezoids, pointwise.
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double expect = 100.0 * gate.transmission(positions[i] - 1.0) +
                          60.0 * gate.transmission(positions[i] - 4.0);
    CHECK(h.counts[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  // Distinct plateau levels on each side of the second rise.
  const auto at = [&](double t) {
    return h.counts[static_cast<std::size_t>((t - positions[0]) / 0.036)];
  };
  CHECK(at(3.0) == doctest::Approx(100.0));
  CHECK(at(4.7) == doctest::Approx(160.0));  // both plateaus overlap here
}

TEST_CASE("empty scene and error paths") {
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  const auto positions = grid(0.0, 0.036, 10);
  const auto h = expected_intensity_profile({}, gate, positions);
  for (double c : h.counts) CHECK(c == 0.0);

  CHECK_THROWS_AS(expected_intensity_profile({}, gate, {}), std::invalid_argument);
  const Reflection bad{-1.0, 0.0};
  CHECK_THROWS_AS(expected_intensity_profile({&bad, 1}, gate, positions),
                  std::invalid_argument);
}

TEST_CASE("linearity, shift covariance and scaling") {
  const GateProfile gate(0.0, 3.8, 0.55, 0.55);
  const auto positions = grid(0.0, 0.036, 300);
  const std::vector<Reflection> a{{30.0, 0.9}, {5.0, 2.0}};
  const std::vector<Reflection> b{{12.0, 4.1}};
  std::vector<Reflection> both = a;
  both.insert(both.end(), b.begin(), b.end());

  const auto ha = expected_intensity_profile(a, gate, positions);
  const auto hb = expected_intensity_profile(b, gate, positions);
  const auto hab = expected_intensity_profile(both, gate, positions);
  for (std::size_t i = 0; i < positions.size(); ++i)
    CHECK(hab.counts[i] == doctest::Approx(ha.counts[i] + hb.counts[i]));

  // Delaying every return by a whole number of steps shifts the profile.
  const int shift = 25;
  std::vector<Reflection> delayed = a;
  for (auto& r : delayed) r.delay_ns += shift * 0.036;
  const auto hd = expected_intensity_profile(delayed, gate, positions);
  for (std::size_t i = shift; i < positions.size(); ++i)
    CHECK(hd.counts[i] == doctest::Approx(ha.counts[i - shift]).epsilon(1e-9));

  std::vector<Reflection> scaled = a;
  for (auto& r : scaled) r.amplitude *= 3.5;
  const auto hs = expected_intensity_profile(scaled, gate, positions);
  for (std::size_t i = 0; i < positions.size(); ++i)
    CHECK(hs.counts[i] == doctest::Approx(3.5 * ha.counts[i]));
}

}  // TEST_SUITE
