#pragma once

#include <span>
#include <vector>

#include "spadsim/gate_profile.hpp"

namespace spadsim {

/// Discrete forward model: out[j] = sum_m g[j - m] * f[m]. The estimate grid
/// shares the measurement grid, so bin i of g is a delay of i steps.
std::vector<double> convolve_delays(std::span<const double> g,
                                    std::span<const double> f);

/// Gate transmission sampled on the scan grid, from the gate foot to the end
/// of the falling edge. Kernel for deconvolving measured profiles.
std::vector<double> sample_gate_kernel(const GateProfile& gate, double step_ns);

inline constexpr int kDefaultDeconvIterations = 200;
inline constexpr double kDefaultDeconvEpsilon = 1e-9;

/// Nonnegativity-preserving deconvolution of h = f * g by multiplicative
/// Richardson-Lucy updates. The returned profile reuses h's position grid;
/// bin i means a delay of i grid steps from the start of the grid.
IntensityProfile deconvolve_profile(const IntensityProfile& h,
                                    std::span<const double> f_samples,
                                    int iterations = kDefaultDeconvIterations,
                                    double epsilon = kDefaultDeconvEpsilon);

}  // namespace spadsim
