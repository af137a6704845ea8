#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spadsim {

/// Saturating photon-counting response of one accumulated image:
/// n_sat frames, each firing at most once.
struct ResponseParams {
  enum class Mode { single, dual };

  Mode mode = Mode::single;
  int n_sat = 4080;       ///< frames per accumulated image / counter full scale
  double tau_ratio = 8.0;  ///< tau_l / tau_s, dual mode only

  static ResponseParams single(int n_sat) { return {Mode::single, n_sat, 1.0}; }
  static ResponseParams dual(int n_sat, double tau_ratio) {
    return {Mode::dual, n_sat, tau_ratio};
  }

  /// Exposure weights of the two dual-mode frame classes relative to the
  /// mean exposure: w_s + w_l = 2.
  double weight_short() const { return 2.0 / (tau_ratio + 1.0); }
  double weight_long() const { return 2.0 * tau_ratio / (tau_ratio + 1.0); }

  void validate() const;
};

/// Output counts for incident counts per image, single exposure:
/// n_sat * (1 - exp(-n_in / n_sat)).
double forward_single(double n_in, const ResponseParams& params);

/// Output counts, dual exposure:
/// n_sat/2 * [(1 - exp(-w_l * n_in / n_sat)) + (1 - exp(-w_s * n_in / n_sat))].
double forward_dual(double n_in, const ResponseParams& params);

/// Mode dispatch over the two forward models.
double forward_response(double n_in, const ResponseParams& params);

/// Inverse of the forward response. Single mode inverts in closed form; dual
/// mode bisects the monotone response to 1e-6 counts. Throws for n_out < 0 or
/// n_out >= n_sat (saturated input cannot be recovered).
double correct_linearity(double n_out, const ResponseParams& params);

struct NoiseStd {
  double raw = 0.0;
  double corrected = 0.0;
};

/// Binomial standard deviation of the accumulated output and the delta-method
/// standard deviation after linearity correction.
NoiseStd noise_std_analytic(double n_in, const ResponseParams& params);

enum class CurveProvenance { analytic, monte_carlo };

struct NoiseCurvePoint {
  double n_in = 0.0;
  double mean_out = 0.0;
  double std_raw = 0.0;
  double std_corrected = 0.0;
  double snr_db = 0.0;
};

struct NoiseCurve {
  ResponseParams params;
  CurveProvenance provenance = CurveProvenance::analytic;
  std::vector<NoiseCurvePoint> points;
};

/// Log-spaced grid, points_per_decade points per decade, inclusive of lo.
std::vector<double> log_grid(double lo, double hi, int points_per_decade = 60);

/// Delta-method noise becomes meaningless at hard saturation; grid points
/// with 1 - n_out/n_sat below this guard are dropped from curves.
inline constexpr double kSaturationGuard = 1e-6;

NoiseCurve analytic_noise_curve(const ResponseParams& params,
                                std::span<const double> n_in_grid);

/// Optional fixed-pattern dark-count term for Monte Carlo noise curves: each
/// trial pixel gets a rate from the population model, adding
/// rate * exposure_s per frame (scaled by the frame class weight).
struct McDcrOptions {
  bool enabled = false;
  double median_cps = 2.0;
  double lognormal_sigma = 0.5;
  double hot_fraction = 0.2;
  double hot_scale = 20.0;
  double frame_exposure_s = 1.0 / 24000.0;
};

struct McNoiseOptions {
  int threads = 0;
  McDcrOptions dcr;
};

/// Monte Carlo noise curve: per grid point, `trials` independent accumulated
/// images of a uniform pixel under the per-frame Bernoulli model. Requires
/// trials >= 100. Deterministic per seed.
NoiseCurve monte_carlo_noise_curve(const ResponseParams& params,
                                   std::span<const double> n_in_grid, int trials,
                                   uint64_t seed,
                                   const McNoiseOptions& options = {});

struct SnrDefinition {
  double threshold_db = 0.0;
};

struct DynamicRangeResult {
  double max_snr_db = 0.0;
  double dr_db = 0.0;
  double n_in_low = 0.0;   ///< lowest grid point with SNR >= threshold
  double n_in_high = 0.0;  ///< highest grid point with SNR >= threshold
  double threshold_db = 0.0;
};

/// SNR(n_in) = 20 log10(n_in / std_corrected); DR from the lowest and highest
/// grid points meeting the threshold. Throws if no point qualifies or the
/// curve has zero noise.
DynamicRangeResult snr_and_dynamic_range(const NoiseCurve& curve,
                                         const SnrDefinition& definition = {});

struct SaturationFit {
  double n_sat = 0.0;
  double tau_ratio = 1.0;  ///< dual mode only
  double residual_rms = 0.0;
  bool low_confidence = false;  ///< data did not constrain the saturation knee
};

/// Least-squares fit of the forward response to (n_in, n_out) points.
/// Requires at least 4 points (2 parameters in dual mode).
SaturationFit fit_saturation_model(
    std::span<const std::pair<double, double>> points, ResponseParams::Mode mode);

}  // namespace spadsim
