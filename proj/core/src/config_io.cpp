#include "spadsim/config_io.hpp"

#include <fstream>

#include <json.hpp>

#include "spadsim/io.hpp"

namespace spadsim {

using nlohmann::json;

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    // e.what() carries the byte position of the failure.
    throw IoError(path.string() + ": " + e.what());
  }
}

double get_num(const json& j, const char* section, const char* key,
               double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw std::invalid_argument(std::string("config: ") + section + "." + key +
                                " must be a number");
  return j[key].get<double>();
}

uint64_t get_u64(const json& j, const char* key, uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  return j[key].get<uint64_t>();
}

}  // namespace

SensorConfig ConfigSpec::build() const {
  SensorConfig c;
  c.width = width;
  c.height = height;
  c.gate = gate;
  SkewMapParams sk = skew;
  sk.base_position_ns = gate.position_ns;
  sk.nominal_length_ns = gate.length_ns;
  c.maps = generate_pixel_maps(width, height, sk, map_seed);
  c.pdp_efficiency = pdp_efficiency;
  if (dcr_spread) {
    DcrPopulationParams pop = dcr_population;
    pop.median_cps = dcr_median_cps;
    c.dcr_cps = generate_dcr_map(width, height, pop, dcr_seed).cps;
  } else {
    c.dcr_cps.assign(static_cast<std::size_t>(width) * height,
                     static_cast<float>(dcr_median_cps));
  }
  DcrTemperatureParams temp;
  temp.tunneling_floor_cps = dcr_tunneling_floor_cps;
  temp.activation_energy_ev = dcr_activation_energy_ev;
  temp.diffusion_prefactor_cps = diffusion_prefactor_for(
      dcr_diffusion_at_reference_cps, dcr_activation_energy_ev,
      dcr_reference_kelvin);
  c.dcr_temperature = temp;
  c.crosstalk_p = crosstalk_p;
  c.n_sat = n_sat;
  c.laser_period_ns = laser_period_ns;
  c.frame_exposure_ns = frame_exposure_ns;
  c.validate();
  return c;
}

ConfigSpec load_config_spec(const std::filesystem::path& path) {
  const json root = parse_file(path);
  ConfigSpec spec;

  if (root.contains("sensor")) {
    const json& s = root["sensor"];
    spec.width = static_cast<int>(get_num(s, "sensor", "width", spec.width));
    spec.height = static_cast<int>(get_num(s, "sensor", "height", spec.height));
    spec.pdp_efficiency =
        get_num(s, "sensor", "pdp_efficiency", spec.pdp_efficiency);
    spec.crosstalk_p = get_num(s, "sensor", "crosstalk_p", spec.crosstalk_p);
    spec.n_sat = static_cast<int>(get_num(s, "sensor", "n_sat", spec.n_sat));
    spec.laser_period_ns =
        get_num(s, "sensor", "laser_period_ns", spec.laser_period_ns);
    spec.frame_exposure_ns =
        get_num(s, "sensor", "frame_exposure_ns", spec.frame_exposure_ns);
  }
  if (spec.width <= 0 || spec.height <= 0)
    throw std::invalid_argument("config: sensor.width/height must be positive");
  if (spec.pdp_efficiency < 0.0 || spec.pdp_efficiency > 1.0)
    throw std::invalid_argument("config: sensor.pdp_efficiency must be in [0, 1]");
  if (spec.crosstalk_p < 0.0 || spec.crosstalk_p >= 0.25)
    throw std::invalid_argument("config: sensor.crosstalk_p must be in [0, 0.25)");
  if (spec.n_sat < 1)
    throw std::invalid_argument("config: sensor.n_sat must be >= 1");
  if (!(spec.laser_period_ns > 0.0))
    throw std::invalid_argument("config: sensor.laser_period_ns must be > 0");
  if (!(spec.frame_exposure_ns > 0.0))
    throw std::invalid_argument("config: sensor.frame_exposure_ns must be > 0");

  if (root.contains("gate")) {
    const json& g = root["gate"];
    try {
      spec.gate = GateProfile(get_num(g, "gate", "position_ns", 0.0),
                              get_num(g, "gate", "length_ns", 3.8),
                              get_num(g, "gate", "rise_ns", 0.55),
                              get_num(g, "gate", "fall_ns", 0.55));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("config: gate: ") + e.what());
    }
  }

  if (root.contains("skew")) {
    const json& k = root["skew"];
    spec.skew.position_fwhm_ns = get_num(k, "skew", "position_fwhm_ns", 0.0);
    spec.skew.length_fwhm_ns = get_num(k, "skew", "length_fwhm_ns", 0.0);
    spec.skew.horizontal_weight =
        get_num(k, "skew", "horizontal_weight", spec.skew.horizontal_weight);
    spec.skew.jitter_weight =
        get_num(k, "skew", "jitter_weight", spec.skew.jitter_weight);
    spec.map_seed = get_u64(k, "seed", spec.map_seed);
    if (spec.skew.position_fwhm_ns < 0.0 || spec.skew.length_fwhm_ns < 0.0)
      throw std::invalid_argument("config: skew FWHM targets must be >= 0");
  }

  if (root.contains("dcr")) {
    const json& d = root["dcr"];
    spec.dcr_median_cps = get_num(d, "dcr", "median_cps", spec.dcr_median_cps);
    if (spec.dcr_median_cps < 0.0)
      throw std::invalid_argument("config: dcr.median_cps must be >= 0");
    if (d.contains("spread")) spec.dcr_spread = d["spread"].get<bool>();
    spec.dcr_population.lognormal_sigma =
        get_num(d, "dcr", "lognormal_sigma", spec.dcr_population.lognormal_sigma);
    spec.dcr_population.hot_fraction =
        get_num(d, "dcr", "hot_fraction", spec.dcr_population.hot_fraction);
    spec.dcr_population.hot_scale =
        get_num(d, "dcr", "hot_scale", spec.dcr_population.hot_scale);
    spec.dcr_population.hot_lognormal_sigma = get_num(
        d, "dcr", "hot_lognormal_sigma", spec.dcr_population.hot_lognormal_sigma);
    spec.dcr_seed = get_u64(d, "seed", spec.dcr_seed);
    if (spec.dcr_population.hot_fraction < 0.0 ||
        spec.dcr_population.hot_fraction > 1.0)
      throw std::invalid_argument("config: dcr.hot_fraction must be in [0, 1]");
    if (d.contains("temperature")) {
      const json& t = d["temperature"];
      spec.dcr_tunneling_floor_cps = get_num(t, "dcr.temperature",
                                             "tunneling_floor_cps",
                                             spec.dcr_tunneling_floor_cps);
      spec.dcr_diffusion_at_reference_cps =
          get_num(t, "dcr.temperature", "diffusion_cps_at_reference",
                  spec.dcr_diffusion_at_reference_cps);
      spec.dcr_reference_kelvin = get_num(t, "dcr.temperature", "reference_kelvin",
                                          spec.dcr_reference_kelvin);
      spec.dcr_activation_energy_ev =
          get_num(t, "dcr.temperature", "activation_energy_ev",
                  spec.dcr_activation_energy_ev);
      if (spec.dcr_tunneling_floor_cps < 0.0 ||
          spec.dcr_diffusion_at_reference_cps < 0.0)
        throw std::invalid_argument("config: dcr.temperature rates must be >= 0");
      if (!(spec.dcr_reference_kelvin > 0.0))
        throw std::invalid_argument(
            "config: dcr.temperature.reference_kelvin must be > 0");
    }
  }

  return spec;
}

void save_config(const std::filesystem::path& path, const ConfigSpec& spec) {
  json root;
  root["sensor"] = {{"width", spec.width},
                    {"height", spec.height},
                    {"pdp_efficiency", spec.pdp_efficiency},
                    {"crosstalk_p", spec.crosstalk_p},
                    {"n_sat", spec.n_sat},
                    {"laser_period_ns", spec.laser_period_ns},
                    {"frame_exposure_ns", spec.frame_exposure_ns}};
  root["gate"] = {{"position_ns", spec.gate.position_ns},
                  {"length_ns", spec.gate.length_ns},
                  {"rise_ns", spec.gate.rise_ns},
                  {"fall_ns", spec.gate.fall_ns}};
  root["skew"] = {{"position_fwhm_ns", spec.skew.position_fwhm_ns},
                  {"length_fwhm_ns", spec.skew.length_fwhm_ns},
                  {"horizontal_weight", spec.skew.horizontal_weight},
                  {"jitter_weight", spec.skew.jitter_weight},
                  {"seed", spec.map_seed}};
  root["dcr"] = {
      {"median_cps", spec.dcr_median_cps},
      {"spread", spec.dcr_spread},
      {"lognormal_sigma", spec.dcr_population.lognormal_sigma},
      {"hot_fraction", spec.dcr_population.hot_fraction},
      {"hot_scale", spec.dcr_population.hot_scale},
      {"hot_lognormal_sigma", spec.dcr_population.hot_lognormal_sigma},
      {"seed", spec.dcr_seed},
      {"temperature",
       {{"tunneling_floor_cps", spec.dcr_tunneling_floor_cps},
        {"diffusion_cps_at_reference", spec.dcr_diffusion_at_reference_cps},
        {"reference_kelvin", spec.dcr_reference_kelvin},
        {"activation_energy_ev", spec.dcr_activation_energy_ev}}}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << root.dump(2) << '\n';
}

SensorConfig load_config(const std::filesystem::path& path) {
  return load_config_spec(path).build();
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  const json root = parse_file(path);
  SceneSpec spec;
  spec.ambient_per_ns = get_num(root, "scene", "ambient_per_ns", 0.0);
  spec.focal_px = get_num(root, "scene", "focal_px", 0.0);
  if (spec.ambient_per_ns < 0.0)
    throw std::invalid_argument("scene: ambient_per_ns must be >= 0");

  if (root.contains("objects")) {
    for (const auto& o : root["objects"]) {
      SceneObject obj;
      const std::string type = o.value("type", "");
      if (type == "flat")
        obj.kind = SceneObject::Kind::flat;
      else if (type == "sphere")
        obj.kind = SceneObject::Kind::sphere;
      else if (type == "plate")
        obj.kind = SceneObject::Kind::plate;
      else
        throw std::invalid_argument("scene: unknown object type '" + type + "'");
      obj.distance_m = get_num(o, "object", "distance_m", obj.distance_m);
      obj.amplitude = get_num(o, "object", "amplitude", obj.amplitude);
      obj.transmittance =
          get_num(o, "object", "transmittance",
                  obj.kind == SceneObject::Kind::plate ? 0.9 : 0.0);
      obj.radius_m = get_num(o, "object", "radius_m", obj.radius_m);
      obj.center_x_px = get_num(o, "object", "center_x_px", 0.0);
      obj.center_y_px = get_num(o, "object", "center_y_px", 0.0);
      spec.objects.push_back(obj);
    }
  }
  if (root.contains("returns")) {
    for (const auto& r : root["returns"]) {
      ExplicitReturn er;
      er.x = static_cast<int>(get_num(r, "return", "x", 0.0));
      er.y = static_cast<int>(get_num(r, "return", "y", 0.0));
      er.amplitude = get_num(r, "return", "amplitude", 0.0);
      er.delay_ns = get_num(r, "return", "delay_ns", 0.0);
      spec.extra_returns.push_back(er);
    }
  }
  return spec;
}

void save_scene(const std::filesystem::path& path, const SceneSpec& spec) {
  json root;
  root["ambient_per_ns"] = spec.ambient_per_ns;
  if (spec.focal_px > 0.0) root["focal_px"] = spec.focal_px;
  root["objects"] = json::array();
  for (const auto& obj : spec.objects) {
    const char* type = obj.kind == SceneObject::Kind::flat     ? "flat"
                       : obj.kind == SceneObject::Kind::sphere ? "sphere"
                                                               : "plate";
    json o = {{"type", type},
              {"distance_m", obj.distance_m},
              {"amplitude", obj.amplitude},
              {"transmittance", obj.transmittance}};
    if (obj.kind == SceneObject::Kind::sphere) {
      o["radius_m"] = obj.radius_m;
      o["center_x_px"] = obj.center_x_px;
      o["center_y_px"] = obj.center_y_px;
    }
    root["objects"].push_back(o);
  }
  if (!spec.extra_returns.empty()) {
    root["returns"] = json::array();
    for (const auto& er : spec.extra_returns)
      root["returns"].push_back({{"x", er.x},
                                 {"y", er.y},
                                 {"amplitude", er.amplitude},
                                 {"delay_ns", er.delay_ns}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << root.dump(2) << '\n';
}

Scene load_scene(const std::filesystem::path& path, int width, int height) {
  return rasterize_scene(load_scene_spec(path), width, height);
}

}  // namespace spadsim
