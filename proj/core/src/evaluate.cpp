#include "spadsim/evaluate.hpp"

#include <cmath>
#include <stdexcept>

namespace spadsim {

AccuracyPrecision evaluate_accuracy_precision(const DepthMap& map, double truth_m,
                                              const RoiRect& roi) {
  if (roi.width <= 0 || roi.height <= 0)
    throw std::invalid_argument("evaluate_accuracy_precision: empty ROI");
  if (roi.x < 0 || roi.y < 0 || roi.x + roi.width > map.width ||
      roi.y + roi.height > map.height)
    throw std::invalid_argument("evaluate_accuracy_precision: ROI outside map");

  double sum = 0.0;
  const std::size_t n = static_cast<std::size_t>(roi.width) * roi.height;
  for (int y = roi.y; y < roi.y + roi.height; ++y)
    for (int x = roi.x; x < roi.x + roi.width; ++x) {
      const std::size_t px = static_cast<std::size_t>(y) * map.width + x;
      if (!map.detected[px])
        throw std::invalid_argument(
            "evaluate_accuracy_precision: undetected pixel in ROI");
      sum += map.distance_m[px];
    }
  const double mean = sum / static_cast<double>(n);

  double ss = 0.0;
  for (int y = roi.y; y < roi.y + roi.height; ++y)
    for (int x = roi.x; x < roi.x + roi.width; ++x) {
      const std::size_t px = static_cast<std::size_t>(y) * map.width + x;
      const double d = map.distance_m[px] - mean;
      ss += d * d;
    }

  AccuracyPrecision out;
  out.accuracy_m = mean - truth_m;
  out.precision_rms_m = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return out;
}

RoiRect centered_roi(int map_width, int map_height, int roi_size) {
  RoiRect roi;
  roi.width = roi_size;
  roi.height = roi_size;
  roi.x = (map_width - roi_size) / 2;
  roi.y = (map_height - roi_size) / 2;
  return roi;
}

}  // namespace spadsim
