#include <doctest.h>

#include <cmath>
#include <vector>

#include "spadsim/rng.hpp"

using namespace spadsim;

TEST_SUITE("rng") {

TEST_CASE("philox known-answer vectors") {
  // Reference vectors for the 4x32, 10-round configuration.
  auto zero = philox::block({0u, 0u}, {0u, 0u, 0u, 0u});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  auto ones = philox::block({0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  auto pi = philox::block({0xa4093822u, 0x299f31d0u},
                          {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("streams are deterministic and addressable") {
  RandomStream a(42, 7, 3);
  RandomStream b(42, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());

  RandomStream c(42, 8, 3);
  bool any_diff = false;
  RandomStream a2(42, 7, 3);
  for (int i = 0; i < 16; ++i) any_diff |= a2.next_u32() != c.next_u32();
  CHECK(any_diff);

  // first_uniform matches the stream's first draw exactly.
  RandomStream d(9, 1234, 56);
  CHECK(d.uniform() == first_uniform(9, 1234, 56));
}

TEST_CASE("uniform moments") {
  RandomStream rng(1, 0, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal moments") {
  RandomStream rng(2, 0, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson mean and variance across both samplers") {
  for (double mu : {0.4, 3.7, 40.0, 400.0}) {
    RandomStream rng(3, static_cast<uint64_t>(mu * 1000), 0);
    const int n = 40000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(mu));
      sum += k;
      sum2 += k * k;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // 5 sigma band on the sample mean, 10% on the variance.
    const double band = 5.0 * std::sqrt(mu / n);
    CHECK(std::fabs(mean - mu) < band);
    CHECK(var == doctest::Approx(mu).epsilon(0.1));
  }
}

TEST_CASE("poisson zero rate") {
  RandomStream rng(4, 0, 0);
  for (int i = 0; i < 10; ++i) CHECK(rng.poisson(0.0) == 0);
}

}  // TEST_SUITE
