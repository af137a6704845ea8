#include "spadsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spadsim/constants.hpp"

namespace spadsim {

void Scene::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("Scene: dimensions must be positive");
  if (offsets.size() != pixel_count() + 1)
    throw std::invalid_argument("Scene: offsets size mismatch");
  if (offsets.front() != 0 || offsets.back() != pool.size())
    throw std::invalid_argument("Scene: offsets do not cover the return pool");
  if (ambient_per_ns < 0.0)
    throw std::invalid_argument("Scene: ambient flux must be >= 0");
  for (const auto& r : pool) {
    if (r.amplitude < 0.0)
      throw std::invalid_argument("Scene: return amplitude must be >= 0");
    if (r.delay_ns < 0.0)
      throw std::invalid_argument("Scene: return delay must be >= 0");
  }
}

Scene Scene::uniform(int width, int height, double amplitude, double delay_ns,
                     double ambient_per_ns) {
  Scene s;
  s.width = width;
  s.height = height;
  s.ambient_per_ns = ambient_per_ns;
  const std::size_t n = s.pixel_count();
  s.offsets.resize(n + 1);
  s.pool.assign(n, Reflection{amplitude, delay_ns});
  for (std::size_t i = 0; i <= n; ++i) s.offsets[i] = static_cast<uint32_t>(i);
  s.validate();
  return s;
}

Scene Scene::dark(int width, int height) {
  Scene s;
  s.width = width;
  s.height = height;
  s.offsets.assign(static_cast<std::size_t>(width) * height + 1, 0);
  s.validate();
  return s;
}

Scene Scene::from_returns(int width, int height,
                          const std::vector<std::vector<Reflection>>& returns,
                          double ambient_per_ns) {
  if (returns.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("Scene: per-pixel return list size mismatch");
  Scene s;
  s.width = width;
  s.height = height;
  s.ambient_per_ns = ambient_per_ns;
  s.offsets.reserve(returns.size() + 1);
  s.offsets.push_back(0);
  for (const auto& list : returns) {
    s.pool.insert(s.pool.end(), list.begin(), list.end());
    s.offsets.push_back(static_cast<uint32_t>(s.pool.size()));
  }
  s.validate();
  return s;
}

double distance_to_delay_ns(double distance_m) {
  return 2.0 * distance_m / kSpeedOfLight_m_per_s * 1e9;
}

namespace {

struct Hit {
  double distance_m;
  double amplitude;
  double transmittance;
};

// Surface point of an object along the pixel ray, or nothing if the pixel is
// outside the object's footprint. dx/dy are pixel offsets from the array
// center, focal the pinhole focal length in pixels.
std::optional<double> object_distance(const SceneObject& obj, double dx,
                                      double dy, double focal) {
  switch (obj.kind) {
    case SceneObject::Kind::flat:
    case SceneObject::Kind::plate:
      return obj.distance_m;
    case SceneObject::Kind::sphere: {
      const double cx = obj.center_x_px, cy = obj.center_y_px;
      const double center_depth = obj.distance_m + obj.radius_m;
      // Lateral offset of the ray at the sphere's depth.
      const double rho = std::hypot(dx - cx, dy - cy) / focal * center_depth;
      if (rho > obj.radius_m) return std::nullopt;
      return center_depth -
             std::sqrt(obj.radius_m * obj.radius_m - rho * rho);
    }
  }
  return std::nullopt;
}

}  // namespace

Scene rasterize_scene(const SceneSpec& spec, int width, int height) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("rasterize_scene: dimensions must be positive");
  for (const auto& obj : spec.objects) {
    if (obj.distance_m <= 0.0)
      throw std::invalid_argument("rasterize_scene: object distance must be > 0");
    if (obj.amplitude < 0.0)
      throw std::invalid_argument("rasterize_scene: object amplitude must be >= 0");
    if (obj.transmittance < 0.0 || obj.transmittance > 1.0)
      throw std::invalid_argument(
          "rasterize_scene: transmittance must be in [0, 1]");
    if (obj.kind == SceneObject::Kind::sphere && obj.radius_m <= 0.0)
      throw std::invalid_argument("rasterize_scene: sphere radius must be > 0");
  }
  const double focal = spec.focal_px > 0.0 ? spec.focal_px : width;

  Scene s;
  s.width = width;
  s.height = height;
  s.ambient_per_ns = spec.ambient_per_ns;
  s.offsets.reserve(s.pixel_count() + 1);
  s.offsets.push_back(0);
  std::vector<float> truth(s.pixel_count(),
                           std::numeric_limits<float>::quiet_NaN());

  std::vector<Hit> hits;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - 0.5 * (width - 1);
      const double dy = y - 0.5 * (height - 1);
      hits.clear();
      for (const auto& obj : spec.objects) {
        if (auto d = object_distance(obj, dx, dy, focal))
          hits.push_back({*d, obj.amplitude, obj.transmittance});
      }
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < hits.size(); ++i) {
        // Light reaching object i passes twice through every object declared
        // after it on this pixel.
        double occlusion = 1.0;
        for (std::size_t j = i + 1; j < hits.size(); ++j)
          occlusion *= hits[j].transmittance * hits[j].transmittance;
        const double a = hits[i].amplitude * occlusion;
        if (a > 0.0) {
          s.pool.push_back({a, distance_to_delay_ns(hits[i].distance_m)});
          nearest = std::min(nearest, hits[i].distance_m);
        }
      }
      const std::size_t px = static_cast<std::size_t>(y) * width + x;
      if (std::isfinite(nearest)) truth[px] = static_cast<float>(nearest);
      s.offsets.push_back(static_cast<uint32_t>(s.pool.size()));
    }
  }

  for (const auto& er : spec.extra_returns) {
    if (er.x < 0 || er.x >= width || er.y < 0 || er.y >= height)
      throw std::invalid_argument("rasterize_scene: explicit return out of range");
  }
  if (!spec.extra_returns.empty()) {
    // Rebuild with the explicit returns appended to their pixels.
    std::vector<std::vector<Reflection>> lists(s.pixel_count());
    for (std::size_t px = 0; px < s.pixel_count(); ++px) {
      auto span = s.returns_at(px);
      lists[px].assign(span.begin(), span.end());
    }
    for (const auto& er : spec.extra_returns)
      lists[static_cast<std::size_t>(er.y) * width + er.x].push_back(
          {er.amplitude, er.delay_ns});
    Scene rebuilt = Scene::from_returns(width, height, lists, spec.ambient_per_ns);
    rebuilt.truth_m = std::move(truth);
    return rebuilt;
  }

  s.truth_m = std::move(truth);
  s.validate();
  return s;
}

}  // namespace spadsim
