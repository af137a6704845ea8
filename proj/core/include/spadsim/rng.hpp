#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spadsim {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every 128-bit output block is a pure function of (key, counter), so random
// streams can be addressed instead of advanced: simulation code keys a stream
// by (seed, pixel, frame) and gets the same values no matter how work is
// split across threads.
namespace philox {

inline constexpr uint32_t kMult0 = 0xD2511F53;
inline constexpr uint32_t kMult1 = 0xCD9E8D57;
inline constexpr uint32_t kWeyl0 = 0x9E3779B9;
inline constexpr uint32_t kWeyl1 = 0xBB67AE85;

inline std::array<uint32_t, 4> block(std::array<uint32_t, 2> key,
                                     std::array<uint32_t, 4> ctr) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kMult0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kMult1) * ctr[2];
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace philox

inline double unit_double(uint64_t bits) {
  // 53-bit mantissa, value in [0, 1).
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic random stream addressed by (seed, stream, substream).
///
/// The draw sequence depends only on the address tuple; interleaving with
/// other streams or moving the stream between threads cannot change it.
class RandomStream {
 public:
  RandomStream(uint64_t seed, uint64_t stream, uint32_t substream = 0)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        ctr_{static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32),
             substream, 0} {}

  uint32_t next_u32() {
    if (pos_ == 4) {
      buf_ = philox::block(key_, ctr_);
      ++ctr_[3];
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  uint64_t next_u64() {
    const uint64_t lo = next_u32();
    const uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() { return unit_double(next_u64()); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; draws come in cached pairs.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  /// Poisson draw. Sequential inversion below mu = 10, transformed
  /// rejection (Hormann's PTRS) above.
  long poisson(double mu) {
    if (mu <= 0.0) return 0;
    return mu < 10.0 ? poisson_inversion(mu) : poisson_ptrs(mu);
  }

 private:
  long poisson_inversion(double mu) {
    const double target = uniform();
    double p = std::exp(-mu);
    double cdf = p;
    long k = 0;
    while (cdf <= target && k < 1000) {
      ++k;
      p *= mu / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  long poisson_ptrs(double mu) {
    const double log_mu = std::log(mu);
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kf * log_mu - std::lgamma(kf + 1.0) - mu) {
        return static_cast<long>(kf);
      }
    }
  }

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> ctr_;
  std::array<uint32_t, 4> buf_{};
  int pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// First uniform of stream (seed, stream, substream) without constructing a
/// RandomStream; identical to RandomStream(...).uniform().
inline double first_uniform(uint64_t seed, uint64_t stream, uint32_t substream) {
  const auto b = philox::block(
      {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      {static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32),
       substream, 0});
  return unit_double(static_cast<uint64_t>(b[0]) |
                     (static_cast<uint64_t>(b[1]) << 32));
}

}  // namespace spadsim
