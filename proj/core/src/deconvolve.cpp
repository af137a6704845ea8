#include "spadsim/deconvolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spadsim {

std::vector<double> convolve_delays(std::span<const double> g,
                                    std::span<const double> f) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double sum = 0.0;
    const std::size_t mmax = std::min(f.size() - 1, j);
    for (std::size_t m = 0; m <= mmax; ++m) sum += g[j - m] * f[m];
    out[j] = sum;
  }
  return out;
}

std::vector<double> sample_gate_kernel(const GateProfile& gate, double step_ns) {
  if (!(step_ns > 0.0))
    throw std::invalid_argument("sample_gate_kernel: step must be > 0");
  const double span = gate.end_ns() - gate.position_ns;
  const auto n = static_cast<std::size_t>(std::ceil(span / step_ns)) + 1;
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k)
    f[k] = gate.transmission(gate.position_ns + static_cast<double>(k) * step_ns);
  return f;
}

IntensityProfile deconvolve_profile(const IntensityProfile& h,
                                    std::span<const double> f_samples,
                                    int iterations, double epsilon) {
  h.validate();
  if (f_samples.empty())
    throw std::invalid_argument("deconvolve_profile: empty kernel");
  double f_sum = 0.0;
  for (double v : f_samples) {
    if (v < 0.0)
      throw std::invalid_argument("deconvolve_profile: kernel must be >= 0");
    f_sum += v;
  }
  if (f_sum <= 0.0)
    throw std::invalid_argument("deconvolve_profile: all-zero kernel");
  if (iterations < 1)
    throw std::invalid_argument("deconvolve_profile: iterations must be >= 1");

  const std::size_t n = h.size();
  const double h_total = std::accumulate(h.counts.begin(), h.counts.end(), 0.0);

  IntensityProfile out;
  out.positions_ns = h.positions_ns;
  if (h_total <= 0.0) {
    out.counts.assign(n, 0.0);
    return out;
  }

  // Flat positive start with the right total mass.
  std::vector<double> g(n, h_total / (f_sum * static_cast<double>(n)));
  std::vector<double> ratio(n);
  std::vector<double> model;
  for (int it = 0; it < iterations; ++it) {
    model = convolve_delays(g, f_samples);
    for (std::size_t j = 0; j < n; ++j)
      ratio[j] = h.counts[j] / std::max(model[j], epsilon);
    for (std::size_t i = 0; i < n; ++i) {
      // Correlation with the kernel, restricted to in-range measurements.
      double num = 0.0, den = 0.0;
      const std::size_t mmax = std::min(f_samples.size() - 1, n - 1 - i);
      for (std::size_t m = 0; m <= mmax; ++m) {
        num += f_samples[m] * ratio[i + m];
        den += f_samples[m];
      }
      g[i] *= den > 0.0 ? num / den : 0.0;
    }
  }
  out.counts = std::move(g);
  return out;
}

}  // namespace spadsim
