#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spadsim/gate_profile.hpp"

namespace spadsim {

/// Per-pixel reflective returns plus ambient flux. Return lists are stored
/// compressed (offsets into one pool) since most pixels carry 0-2 returns.
struct Scene {
  int width = 0;
  int height = 0;
  double ambient_per_ns = 0.0;  ///< expected detected counts per ns of open gate
  std::vector<uint32_t> offsets;  ///< size width*height + 1
  std::vector<Reflection> pool;
  std::optional<std::vector<float>> truth_m;  ///< nearest-surface distance

  std::span<const Reflection> returns_at(std::size_t pixel) const {
    return {pool.data() + offsets[pixel], pool.data() + offsets[pixel + 1]};
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  void validate() const;

  /// Every pixel carries the same single return.
  static Scene uniform(int width, int height, double amplitude, double delay_ns,
                       double ambient_per_ns = 0.0);
  static Scene dark(int width, int height);
  /// Arbitrary per-pixel return lists (tests, point sources).
  static Scene from_returns(int width, int height,
                            const std::vector<std::vector<Reflection>>& returns,
                            double ambient_per_ns = 0.0);
};

/// Declarative scene objects, rasterized through a pinhole projection.
/// Declaration order resolves overlap: a later object filters everything
/// declared before it by its round-trip transmittance.
struct SceneObject {
  enum class Kind { flat, sphere, plate };
  Kind kind = Kind::flat;
  double distance_m = 1.0;   ///< camera to nearest surface point
  double amplitude = 0.5;    ///< detected counts per frame on an open gate
  double transmittance = 0.0;  ///< one-way; squared for what lies behind
  double radius_m = 0.1;       ///< spheres only
  double center_x_px = 0.0;    ///< sphere center offset from the array center
  double center_y_px = 0.0;
};

struct ExplicitReturn {
  int x = 0;
  int y = 0;
  double amplitude = 0.0;
  double delay_ns = 0.0;
};

struct SceneSpec {
  double ambient_per_ns = 0.0;
  double focal_px = 0.0;  ///< pinhole focal length in pixel units; 0 = width
  std::vector<SceneObject> objects;
  std::vector<ExplicitReturn> extra_returns;
};

Scene rasterize_scene(const SceneSpec& spec, int width, int height);

/// Round-trip delay of a surface at the given distance.
double distance_to_delay_ns(double distance_m);

}  // namespace spadsim
