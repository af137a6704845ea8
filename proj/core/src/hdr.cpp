#include "spadsim/hdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spadsim/parallel.hpp"
#include "spadsim/rng.hpp"

namespace spadsim {

void ResponseParams::validate() const {
  if (n_sat < 1)
    throw std::invalid_argument("ResponseParams: n_sat must be >= 1");
  if (mode == Mode::dual && !(tau_ratio > 0.0))
    throw std::invalid_argument("ResponseParams: tau_ratio must be > 0");
}

double forward_single(double n_in, const ResponseParams& params) {
  params.validate();
  if (n_in < 0.0)
    throw std::invalid_argument("forward_single: n_in must be >= 0");
  const double m = params.n_sat;
  return m * -std::expm1(-n_in / m);
}

double forward_dual(double n_in, const ResponseParams& params) {
  params.validate();
  if (n_in < 0.0)
    throw std::invalid_argument("forward_dual: n_in must be >= 0");
  const double m = params.n_sat;
  const double ws = params.weight_short();
  const double wl = params.weight_long();
  return 0.5 * m * (-std::expm1(-wl * n_in / m) + -std::expm1(-ws * n_in / m));
}

double forward_response(double n_in, const ResponseParams& params) {
  return params.mode == ResponseParams::Mode::single ? forward_single(n_in, params)
                                                     : forward_dual(n_in, params);
}

namespace {

double forward_derivative(double n_in, const ResponseParams& params) {
  const double m = params.n_sat;
  if (params.mode == ResponseParams::Mode::single) return std::exp(-n_in / m);
  const double ws = params.weight_short();
  const double wl = params.weight_long();
  return 0.5 * (wl * std::exp(-wl * n_in / m) + ws * std::exp(-ws * n_in / m));
}

}  // namespace

double correct_linearity(double n_out, const ResponseParams& params) {
  params.validate();
  if (n_out < 0.0)
    throw std::invalid_argument("correct_linearity: n_out must be >= 0");
  const double m = params.n_sat;
  if (n_out >= m)
    throw std::invalid_argument("correct_linearity: output is saturated");
  if (n_out == 0.0) return 0.0;
  if (params.mode == ResponseParams::Mode::single)
    return -m * std::log1p(-n_out / m);

  // Monotone response: bracket then bisect until the bracketed output
  // interval is below 1e-6 counts.
  double lo = 0.0;
  double hi = std::max(1.0, n_out);
  while (forward_dual(hi, params) < n_out) {
    hi *= 2.0;
    if (hi > 1e15)
      throw std::invalid_argument("correct_linearity: output is saturated");
  }
  for (int i = 0; i < 200; ++i) {
    if (forward_dual(hi, params) - forward_dual(lo, params) <= 1e-6 &&
        hi - lo <= 1e-9 * std::max(1.0, hi))
      break;
    const double mid = 0.5 * (lo + hi);
    if (forward_dual(mid, params) < n_out)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

NoiseStd noise_std_analytic(double n_in, const ResponseParams& params) {
  params.validate();
  if (n_in < 0.0)
    throw std::invalid_argument("noise_std_analytic: n_in must be >= 0");
  const double m = params.n_sat;
  double variance = 0.0;
  if (params.mode == ResponseParams::Mode::single) {
    const double p = -std::expm1(-n_in / m);
    variance = m * p * (1.0 - p);
  } else {
    const double ps = -std::expm1(-params.weight_short() * n_in / m);
    const double pl = -std::expm1(-params.weight_long() * n_in / m);
    variance = 0.5 * m * (ps * (1.0 - ps) + pl * (1.0 - pl));
  }
  NoiseStd out;
  out.raw = std::sqrt(variance);
  const double deriv = forward_derivative(n_in, params);
  out.corrected = deriv > 0.0 ? out.raw / deriv : 0.0;
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || points_per_decade < 1)
    throw std::invalid_argument("log_grid: invalid range");
  std::vector<double> grid;
  const double step = 1.0 / points_per_decade;
  const double decades = std::log10(hi / lo);
  const int n = static_cast<int>(std::floor(decades / step + 1e-9)) + 1;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) grid.push_back(lo * std::pow(10.0, i * step));
  return grid;
}

NoiseCurve analytic_noise_curve(const ResponseParams& params,
                                std::span<const double> n_in_grid) {
  params.validate();
  NoiseCurve curve;
  curve.params = params;
  curve.provenance = CurveProvenance::analytic;
  for (double x : n_in_grid) {
    const double mean = forward_response(x, params);
    if (1.0 - mean / params.n_sat < kSaturationGuard) break;
    const NoiseStd std = noise_std_analytic(x, params);
    NoiseCurvePoint pt;
    pt.n_in = x;
    pt.mean_out = mean;
    pt.std_raw = std.raw;
    pt.std_corrected = std.corrected;
    pt.snr_db = std.corrected > 0.0 ? 20.0 * std::log10(x / std.corrected) : 0.0;
    curve.points.push_back(pt);
  }
  return curve;
}

NoiseCurve monte_carlo_noise_curve(const ResponseParams& params,
                                   std::span<const double> n_in_grid, int trials,
                                   uint64_t seed, const McNoiseOptions& options) {
  params.validate();
  if (trials < 100)
    throw std::invalid_argument("monte_carlo_noise_curve: trials must be >= 100");
  if (n_in_grid.empty())
    throw std::invalid_argument("monte_carlo_noise_curve: empty grid");

  NoiseCurve curve;
  curve.params = params;
  curve.provenance = CurveProvenance::monte_carlo;
  const double m = params.n_sat;
  const int frames = params.n_sat;

  for (std::size_t gi = 0; gi < n_in_grid.size(); ++gi) {
    const double n_in = n_in_grid[gi];
    if (n_in < 0.0)
      throw std::invalid_argument("monte_carlo_noise_curve: n_in must be >= 0");
    if (1.0 - forward_response(n_in, params) / m < kSaturationGuard) continue;

    const double ws = params.mode == ResponseParams::Mode::dual
                          ? params.weight_short()
                          : 1.0;
    const double wl = params.mode == ResponseParams::Mode::dual
                          ? params.weight_long()
                          : 1.0;

    std::vector<double> raw(trials), corrected(trials);
    parallel_for(
        0, static_cast<std::size_t>(trials),
        [&](std::size_t lo, std::size_t hi) {
          for (std::size_t trial = lo; trial < hi; ++trial) {
            // Each trial is an independent virtual pixel keyed by
            // (grid point, trial).
            const uint64_t stream = gi * 0x100000000ull + trial;
            double dark_mu = 0.0;
            if (options.dcr.enabled) {
              RandomStream dcr_rng(seed ^ 0x5AD5AD5AD5AD5ADull, stream, 0xFFFFFFFF);
              double rate = options.dcr.median_cps *
                            std::exp(options.dcr.lognormal_sigma * dcr_rng.normal());
              if (dcr_rng.uniform() < options.dcr.hot_fraction)
                rate *= options.dcr.hot_scale;
              dark_mu = rate * options.dcr.frame_exposure_s;
            }
            const double mu_even = ws * (n_in / m + dark_mu);
            const double mu_odd = wl * (n_in / m + dark_mu);
            const double p_even = -std::expm1(-mu_even);
            const double p_odd = -std::expm1(-mu_odd);
            uint32_t count = 0;
            for (int f = 0; f < frames; ++f) {
              const double p = (f % 2 == 0) ? p_even : p_odd;
              if (first_uniform(seed, stream, static_cast<uint32_t>(f)) < p)
                ++count;
            }
            raw[trial] = count;
            corrected[trial] = count < m ? correct_linearity(count, params)
                                         : std::numeric_limits<double>::quiet_NaN();
          }
        },
        options.threads);

    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= trials;
    double var = 0.0;
    for (double v : raw) var += (v - mean) * (v - mean);
    var /= std::max(1, trials - 1);

    double cmean = 0.0, cvar = 0.0;
    int cn = 0;
    for (double v : corrected)
      if (std::isfinite(v)) {
        cmean += v;
        ++cn;
      }
    if (cn > 1) {
      cmean /= cn;
      for (double v : corrected)
        if (std::isfinite(v)) cvar += (v - cmean) * (v - cmean);
      cvar /= cn - 1;
    }

    NoiseCurvePoint pt;
    pt.n_in = n_in;
    pt.mean_out = mean;
    pt.std_raw = std::sqrt(var);
    pt.std_corrected = std::sqrt(cvar);
    pt.snr_db = pt.std_corrected > 0.0 ? 20.0 * std::log10(n_in / pt.std_corrected)
                                       : 0.0;
    curve.points.push_back(pt);
  }
  if (curve.points.empty())
    throw std::invalid_argument(
        "monte_carlo_noise_curve: grid entirely beyond the saturation guard");
  return curve;
}

DynamicRangeResult snr_and_dynamic_range(const NoiseCurve& curve,
                                         const SnrDefinition& definition) {
  if (curve.points.empty())
    throw std::invalid_argument("snr_and_dynamic_range: empty curve");
  for (const auto& pt : curve.points) {
    if (pt.n_in > 0.0 && pt.std_corrected <= 0.0)
      throw std::invalid_argument(
          "snr_and_dynamic_range: zero-noise curve, SNR undefined");
  }
  DynamicRangeResult out;
  out.threshold_db = definition.threshold_db;
  out.max_snr_db = -std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 0.0;
  for (const auto& pt : curve.points) {
    out.max_snr_db = std::max(out.max_snr_db, pt.snr_db);
    if (pt.snr_db >= definition.threshold_db) {
      if (lo == 0.0) lo = pt.n_in;
      hi = pt.n_in;
    }
  }
  if (lo == 0.0)
    throw std::invalid_argument(
        "snr_and_dynamic_range: no grid point meets the SNR threshold");
  out.n_in_low = lo;
  out.n_in_high = hi;
  out.dr_db = 20.0 * std::log10(hi / lo);
  return out;
}

namespace {

// Nelder-Mead on the residual in log-parameter space; small and adequate for
// 1-2 well-behaved parameters.
struct Simplex2 {
  static constexpr int kMaxIter = 2000;

  template <typename F>
  static std::vector<double> minimize(F f, std::vector<double> start) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> pts(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += 0.5;
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

    for (int it = 0; it < kMaxIter; ++it) {
      // Order: best first.
      for (std::size_t i = 0; i <= dim; ++i)
        for (std::size_t j = i + 1; j <= dim; ++j)
          if (vals[j] < vals[i]) {
            std::swap(vals[i], vals[j]);
            std::swap(pts[i], pts[j]);
          }
      if (std::fabs(vals[dim] - vals[0]) < 1e-14 * (1.0 + std::fabs(vals[0])))
        break;

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j] / dim;

      auto blend = [&](double t) {
        std::vector<double> p(dim);
        for (std::size_t j = 0; j < dim; ++j)
          p[j] = centroid[j] + t * (pts[dim][j] - centroid[j]);
        return p;
      };

      auto reflected = blend(-1.0);
      const double fr = f(reflected);
      if (fr < vals[0]) {
        auto expanded = blend(-2.0);
        const double fe = f(expanded);
        pts[dim] = fe < fr ? expanded : reflected;
        vals[dim] = std::min(fe, fr);
      } else if (fr < vals[dim - 1]) {
        pts[dim] = reflected;
        vals[dim] = fr;
      } else {
        auto contracted = blend(0.5);
        const double fc = f(contracted);
        if (fc < vals[dim]) {
          pts[dim] = contracted;
          vals[dim] = fc;
        } else {
          for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j)
              pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
            vals[i] = f(pts[i]);
          }
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i)
      if (vals[i] < vals[best]) best = i;
    return pts[best];
  }
};

}  // namespace

SaturationFit fit_saturation_model(
    std::span<const std::pair<double, double>> points, ResponseParams::Mode mode) {
  if (points.size() < 4)
    throw std::invalid_argument("fit_saturation_model: need at least 4 points");
  double max_in = 0.0, max_out = 0.0;
  for (const auto& [x, y] : points) {
    if (x < 0.0 || y < 0.0)
      throw std::invalid_argument("fit_saturation_model: negative point");
    max_in = std::max(max_in, x);
    max_out = std::max(max_out, y);
  }

  auto residual = [&](const std::vector<double>& lp) {
    const double n_sat = std::exp(lp[0]);
    const double ratio = mode == ResponseParams::Mode::dual ? std::exp(lp[1]) : 1.0;
    double ss = 0.0;
    for (const auto& [x, y] : points) {
      double model;
      if (mode == ResponseParams::Mode::single) {
        model = n_sat * -std::expm1(-x / n_sat);
      } else {
        const double ws = 2.0 / (ratio + 1.0);
        const double wl = 2.0 * ratio / (ratio + 1.0);
        model = 0.5 * n_sat *
                (-std::expm1(-wl * x / n_sat) + -std::expm1(-ws * x / n_sat));
      }
      ss += (model - y) * (model - y);
    }
    return ss;
  };

  // The observed ceiling is a good first guess for the knee.
  std::vector<double> start;
  start.push_back(std::log(std::max({1.0, max_out * 1.05, max_in * 0.01})));
  if (mode == ResponseParams::Mode::dual) start.push_back(std::log(4.0));
  const auto best = Simplex2::minimize(residual, start);

  SaturationFit fit;
  fit.n_sat = std::exp(best[0]);
  fit.tau_ratio = mode == ResponseParams::Mode::dual ? std::exp(best[1]) : 1.0;
  fit.residual_rms = std::sqrt(residual(best) / points.size());
  // If every point sits in the linear regime the knee is unconstrained.
  fit.low_confidence = max_in < 0.5 * fit.n_sat;
  return fit;
}

}  // namespace spadsim
