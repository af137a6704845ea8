#pragma once

#include "spadsim/reconstruct.hpp"

namespace spadsim {

struct RoiRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

struct AccuracyPrecision {
  double accuracy_m = 0.0;       ///< mean measured distance minus truth
  double precision_rms_m = 0.0;  ///< standard deviation over the ROI
};

/// Mean error and spread of the measured distance over a fully detected ROI.
/// Throws if the ROI leaves the map or contains an undetected pixel.
AccuracyPrecision evaluate_accuracy_precision(const DepthMap& map, double truth_m,
                                              const RoiRect& roi);

/// Centered ROI helper.
RoiRect centered_roi(int map_width, int map_height, int roi_size);

}  // namespace spadsim
