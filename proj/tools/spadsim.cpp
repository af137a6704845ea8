// spadsim: behavioral simulation of a time-gated photon-counting image
// sensor, with HDR response analysis and gate-scan 3D reconstruction.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spadsim/config_io.hpp"
#include "spadsim/constants.hpp"
#include "spadsim/evaluate.hpp"
#include "spadsim/hdr.hpp"
#include "spadsim/io.hpp"
#include "spadsim/manifest.hpp"
#include "spadsim/reconstruct.hpp"
#include "spadsim/scan.hpp"
#include "spadsim/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spadsim;

namespace {

// Exit statuses: 0 ok, 1 internal, 2 usage, 3 missing/unreadable file,
// 4 invalid configuration or argument, 5 capacity violation, 6 verify failed.
enum ExitStatus {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kFileError = 3,
  kInvalid = 4,
  kCapacity = 5,
  kVerifyFailed = 6,
};

struct CommonOpts {
  std::string config_path;
  std::string scene_path;
  std::string out_dir = "out";
  uint64_t seed = 1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_scene) {
  cmd->add_option("--config", opts.config_path, "sensor config JSON");
  auto* scene =
      cmd->add_option("--scene", opts.scene_path, "scene description JSON");
  if (needs_scene) scene->required();
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "master random seed")
      ->capture_default_str();
  cmd->add_option("--threads", opts.threads,
                  "worker threads (0 = hardware concurrency)");
}

ConfigSpec resolve_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) return ConfigSpec{};
  return load_config_spec(opts.config_path);
}

RunManifest make_manifest(const std::string& command, const CommonOpts& opts) {
  RunManifest m;
  m.command = command;
  m.seed = opts.seed;
  m.tool_version = kToolVersion;
  if (!opts.config_path.empty())
    m.inputs.emplace_back(opts.config_path, sha256_file(opts.config_path));
  if (!opts.scene_path.empty())
    m.inputs.emplace_back(opts.scene_path, sha256_file(opts.scene_path));
  return m;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

void parse_plan_spec(const std::string& s, double* start, double* step,
                     int* count) {
  double a = 0, b = 0;
  int c = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &a, &b, &c) != 3)
    throw std::invalid_argument("--plan expects start:step:count");
  *start = a;
  *step = b;
  *count = c;
}

std::vector<std::pair<double, double>> parse_ranges(const std::string& s) {
  std::vector<std::pair<double, double>> ranges;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto comma = s.find(',', pos);
    const std::string item = s.substr(pos, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - pos);
    double lo = 0, hi = 0;
    if (std::sscanf(item.c_str(), "%lf:%lf", &lo, &hi) != 2)
      throw std::invalid_argument("--ranges expects lo:hi[,lo:hi...]");
    ranges.emplace_back(lo, hi);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (ranges.empty()) throw std::invalid_argument("--ranges is empty");
  return ranges;
}

void write_depth_outputs(const fs::path& dir, const std::string& stem,
                         const DepthMap& map) {
  write_depth_csv(dir / (stem + ".csv"), map);
  float lo = 0.0f, hi = 0.0f;
  bool any = false;
  for (std::size_t i = 0; i < map.distance_m.size(); ++i) {
    if (!map.detected[i]) continue;
    if (!any || map.distance_m[i] < lo) lo = map.distance_m[i];
    if (!any || map.distance_m[i] > hi) hi = map.distance_m[i];
    any = true;
  }
  std::vector<double> values(map.distance_m.begin(), map.distance_m.end());
  write_pgm16(dir / (stem + ".pgm"), map.width, map.height, values, lo,
              any && hi > lo ? hi : lo + 1.0, map.detected.data());
  write_json(dir / (stem + "_scale.json"),
             json{{"min_m", lo},
                  {"max_m", any && hi > lo ? hi : lo + 1.0},
                  {"lsb_m", map.lsb_m},
                  {"no_detection_value", 0}});
}

// --- subcommands ---------------------------------------------------------

int cmd_gen_maps(const CommonOpts& opts) {
  const ConfigSpec spec = resolve_config(opts);
  const SensorConfig config = spec.build();
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  write_map_csv(dir / "position_map.csv", config.width, config.height,
                config.maps.position_ns);
  write_map_binary(dir / "position_map.bin", config.width, config.height,
                   config.maps.position_ns);
  write_map_csv(dir / "length_map.csv", config.width, config.height,
                config.maps.length_ns);
  write_map_binary(dir / "length_map.bin", config.width, config.height,
                   config.maps.length_ns);

  const GateStats stats = measure_gate_stats(config.maps);
  auto hist_csv = [&](const fs::path& path, const Histogram& h) {
    std::ofstream out(path, std::ios::binary);
    out << "bin_center_ns,count\n";
    char buf[64];
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", h.center(i), h.counts[i]);
      out << buf;
    }
  };
  hist_csv(dir / "position_hist.csv", stats.position_histogram);
  hist_csv(dir / "length_hist.csv", stats.length_histogram);
  write_json(dir / "gate_stats.json",
             json{{"position_fwhm_ns", stats.position_fwhm_ns},
                  {"length_fwhm_ns", stats.length_fwhm_ns},
                  {"position_degenerate", stats.position_degenerate},
                  {"length_degenerate", stats.length_degenerate}});
  write_manifest(dir, make_manifest("gen-maps", opts));
  std::cout << "gen-maps: position FWHM " << stats.position_fwhm_ns * 1e3
            << " ps, length FWHM " << stats.length_fwhm_ns * 1e3 << " ps\n";
  return kOk;
}

int cmd_simulate_2d(const CommonOpts& opts, int frames, const std::string& mode,
                    double tau_ratio, double gate_position, bool save_stack) {
  const ConfigSpec spec = resolve_config(opts);
  const SensorConfig config = spec.build();
  const Scene scene = opts.scene_path.empty()
                          ? Scene::dark(config.width, config.height)
                          : load_scene(opts.scene_path, config.width,
                                       config.height);
  const int n_frames = frames > 0 ? frames : config.n_sat;
  const double tau_m = config.frame_exposure_ns;

  ExposureSchedule schedule =
      mode == "dual"
          ? ExposureSchedule::dual(n_frames, 2.0 * tau_m / (tau_ratio + 1.0),
                                   2.0 * tau_m * tau_ratio / (tau_ratio + 1.0))
          : ExposureSchedule::single(n_frames, tau_m);

  SimOptions sim;
  sim.threads = opts.threads;
  const IntensityImage image = accumulate_frames(scene, config, gate_position,
                                                 schedule, opts.seed, sim);

  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);
  write_image_csv(dir / "image.csv", image);
  write_pgm16(dir / "image.pgm", image.width, image.height, image.counts, 0.0,
              static_cast<double>(config.n_sat));

  if (save_stack) {
    FrameStack stack;
    stack.width = config.width;
    stack.height = config.height;
    for (int f = 0; f < n_frames; ++f) {
      // Rebuilding the same frames the accumulation drew: identical keys.
      SensorConfig scaled = config;
      const double scale = schedule.frame_exposure_ns(f) / tau_m;
      SimOptions frame_opts = sim;
      frame_opts.frame_index_offset = 0;
      Scene scaled_scene = scene;
      for (auto& r : scaled_scene.pool) r.amplitude *= scale;
      scaled_scene.ambient_per_ns *= scale;
      for (auto& d : scaled.dcr_cps) d *= static_cast<float>(scale);
      stack.frames.push_back(simulate_binary_frame(
          scaled_scene, scaled, gate_position, static_cast<uint32_t>(f),
          opts.seed, frame_opts));
    }
    write_frame_stack(dir / "stack.spdf", stack);
  }
  write_manifest(dir, make_manifest("simulate-2d", opts));
  std::cout << "simulate-2d: " << n_frames << " frames (" << mode << ")\n";
  return kOk;
}

int cmd_analyze_hdr(const CommonOpts& opts, int trials, double tau_ratio,
                    bool dcr_fpn) {
  const ConfigSpec spec = resolve_config(opts);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  const auto analytic_grid = log_grid(0.1, 1e7, 60);
  const auto mc_grid = log_grid(1.0, 10.0 * spec.n_sat, 3);

  McNoiseOptions mc_opts;
  mc_opts.threads = opts.threads;
  mc_opts.dcr.enabled = dcr_fpn;
  mc_opts.dcr.median_cps = spec.dcr_median_cps;
  mc_opts.dcr.frame_exposure_s = spec.frame_exposure_ns * 1e-9;

  json summary;
  summary["snr_threshold_db"] = 0.0;
  double dr_single = 0.0, dr_dual = 0.0;
  for (const char* mode : {"single", "dual"}) {
    const ResponseParams params =
        std::string(mode) == "single"
            ? ResponseParams::single(spec.n_sat)
            : ResponseParams::dual(spec.n_sat, tau_ratio);
    const NoiseCurve analytic = analytic_noise_curve(params, analytic_grid);
    const NoiseCurve mc =
        monte_carlo_noise_curve(params, mc_grid, trials, opts.seed, mc_opts);
    write_noise_curve_csv(dir / (std::string("noise_") + mode + "_analytic.csv"),
                          analytic);
    write_noise_curve_csv(dir / (std::string("noise_") + mode + "_mc.csv"), mc);
    const DynamicRangeResult dr = snr_and_dynamic_range(analytic);
    summary[mode] = {{"max_snr_db", dr.max_snr_db},
                     {"dr_db", dr.dr_db},
                     {"n_in_low", dr.n_in_low},
                     {"n_in_high", dr.n_in_high}};
    (std::string(mode) == "single" ? dr_single : dr_dual) = dr.dr_db;
  }
  summary["dr_improvement_db"] = dr_dual - dr_single;
  summary["tau_ratio"] = tau_ratio;
  write_json(dir / "summary.json", summary);
  write_manifest(dir, make_manifest("analyze-hdr", opts));
  std::cout << "analyze-hdr: DR single " << dr_single << " dB, dual " << dr_dual
            << " dB, improvement " << dr_dual - dr_single << " dB\n";
  return kOk;
}

int cmd_scan_3d(const CommonOpts& opts, const std::string& plan_spec, int frames,
                int window, double floor, bool save_stack,
                const std::string& roi_spec) {
  const ConfigSpec spec = resolve_config(opts);
  const SensorConfig config = spec.build();
  const Scene scene = load_scene(opts.scene_path, config.width, config.height);

  ScanPlan plan;
  parse_plan_spec(plan_spec, &plan.start_ns, &plan.step_ns, &plan.count);
  plan.frames_per_position = frames;

  SimOptions sim;
  sim.threads = opts.threads;
  const ProfileStack stack = scan_gate(scene, config, plan, opts.seed, sim);

  ReconstructOptions recon;
  recon.smooth_window = window;
  recon.amplitude_floor = floor;
  recon.threads = opts.threads;
  const DepthMap depth = build_depth_map(stack, config.maps, config.gate, recon);

  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);
  write_depth_outputs(dir, "depth", depth);
  write_profile_csv(dir / "profile_center.csv",
                    stack.profile_at(stack.pixel_count() / 2 +
                                     config.width / 2));
  if (save_stack)
    write_profile_stack(dir / "stack.spdf", dir / "positions.csv", stack);

  if (!roi_spec.empty()) {
    RoiRect roi;
    if (std::sscanf(roi_spec.c_str(), "%d:%d:%d:%d", &roi.x, &roi.y, &roi.width,
                    &roi.height) != 4)
      throw std::invalid_argument("--roi expects x:y:w:h");
    if (!scene.truth_m)
      throw std::invalid_argument("scan-3d: scene has no truth for evaluation");
    // Truth over the ROI: median of the per-pixel nearest-surface distances.
    std::vector<float> truths;
    for (int y = roi.y; y < roi.y + roi.height; ++y)
      for (int x = roi.x; x < roi.x + roi.width; ++x) {
        const float t = (*scene.truth_m)[static_cast<std::size_t>(y) *
                                             scene.width + x];
        if (std::isfinite(t)) truths.push_back(t);
      }
    if (truths.empty())
      throw std::invalid_argument("scan-3d: ROI has no true surface");
    std::nth_element(truths.begin(), truths.begin() + truths.size() / 2,
                     truths.end());
    const double truth = truths[truths.size() / 2];
    const AccuracyPrecision eval = evaluate_accuracy_precision(depth, truth, roi);
    std::ofstream out(dir / "eval.csv", std::ios::binary);
    out << "truth_m,accuracy_m,precision_rms_m\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f\n", truth, eval.accuracy_m,
                  eval.precision_rms_m);
    out << buf;
  }
  write_manifest(dir, make_manifest("scan-3d", opts));
  std::cout << "scan-3d: " << plan.count << " positions, LSB " << depth.lsb_m * 1e3
            << " mm\n";
  return kOk;
}

int cmd_multi_object(const CommonOpts& opts, const std::string& plan_spec,
                     int frames, const std::string& ranges_spec, int window,
                     int vwindow, double sensitivity, double floor) {
  const ConfigSpec spec = resolve_config(opts);
  const SensorConfig config = spec.build();
  const Scene scene = load_scene(opts.scene_path, config.width, config.height);

  ScanPlan plan;
  parse_plan_spec(plan_spec, &plan.start_ns, &plan.step_ns, &plan.count);
  plan.frames_per_position = frames;
  const auto ranges = parse_ranges(ranges_spec);

  SimOptions sim;
  sim.threads = opts.threads;
  const ProfileStack stack = scan_gate(scene, config, plan, opts.seed, sim);

  ReconstructOptions recon;
  recon.smooth_window = window;
  recon.vwindow = vwindow;
  recon.sensitivity = sensitivity;
  recon.amplitude_floor = floor;
  recon.threads = opts.threads;
  const auto maps = build_depth_maps(stack, config.maps, config.gate, ranges, recon);

  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);
  for (std::size_t r = 0; r < maps.size(); ++r)
    write_depth_outputs(dir, "depth_range_" + std::to_string(r), maps[r]);
  write_manifest(dir, make_manifest("multi-object", opts));
  std::cout << "multi-object: " << maps.size() << " range windows\n";
  return kOk;
}

int cmd_fit_dcr(const CommonOpts& opts, const std::string& samples_path,
                const std::string& temps_spec) {
  const ConfigSpec spec = resolve_config(opts);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  std::vector<std::pair<double, double>> samples;
  double floor = spec.dcr_tunneling_floor_cps;
  if (!samples_path.empty()) {
    std::ifstream in(samples_path);
    if (!in) throw IoError("cannot open for reading: " + samples_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.rfind("kelvin", 0) == 0) continue;
      double t = 0, d = 0;
      if (std::sscanf(line.c_str(), "%lf,%lf", &t, &d) != 2)
        throw IoError("bad sample row: " + line);
      samples.emplace_back(t, d);
    }
  } else {
    double lo = 243.15, hi = 343.15, step = 10.0;
    if (!temps_spec.empty() &&
        std::sscanf(temps_spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3)
      throw std::invalid_argument("--temps expects lo:hi:step in kelvin");
    DcrTemperatureParams params;
    params.tunneling_floor_cps = spec.dcr_tunneling_floor_cps;
    params.activation_energy_ev = spec.dcr_activation_energy_ev;
    params.diffusion_prefactor_cps = diffusion_prefactor_for(
        spec.dcr_diffusion_at_reference_cps, spec.dcr_activation_energy_ev,
        spec.dcr_reference_kelvin);
    for (double t = lo; t <= hi + 1e-9; t += step)
      samples.emplace_back(t, dcr_at_temperature(params, t));
  }

  {
    std::ofstream out(dir / "dcr_samples.csv", std::ios::binary);
    out << "kelvin,dcr_cps\n";
    char buf[64];
    for (const auto& [t, d] : samples) {
      std::snprintf(buf, sizeof buf, "%.6f,%.9g\n", t, d);
      out << buf;
    }
  }
  const double ea = fit_activation_energy(samples, floor);
  write_json(dir / "fit.json", json{{"activation_energy_ev", ea},
                                    {"tunneling_floor_cps", floor},
                                    {"samples", samples.size()}});
  write_manifest(dir, make_manifest("fit-dcr", opts));
  std::cout << "fit-dcr: activation energy " << ea << " eV\n";
  return kOk;
}

int cmd_verify(const std::string& dir) {
  std::string diagnostic;
  if (verify_manifest(dir, &diagnostic)) {
    std::cout << "verify: OK\n";
    return kOk;
  }
  std::cerr << "verify: " << diagnostic << "\n";
  return kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-gated photon-counting sensor simulator"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  auto* gen = app.add_subcommand("gen-maps", "generate and export gate maps");
  add_common(gen, gen_opts, false);

  CommonOpts sim_opts;
  int sim_frames = 0;
  std::string sim_mode = "single";
  double sim_ratio = 8.0;
  double sim_gate_position = 0.0;
  bool sim_save_stack = false;
  auto* sim = app.add_subcommand("simulate-2d", "accumulate binary frames");
  add_common(sim, sim_opts, false);
  sim->add_option("--frames", sim_frames, "frames per image (default n_sat)");
  sim->add_option("--mode", sim_mode, "single|dual")
      ->check(CLI::IsMember({"single", "dual"}))
      ->capture_default_str();
  sim->add_option("--ratio", sim_ratio, "dual exposure ratio tau_l/tau_s")
      ->capture_default_str();
  sim->add_option("--gate-position", sim_gate_position,
                  "commanded gate position (ns)")
      ->capture_default_str();
  sim->add_flag("--save-stack", sim_save_stack, "write the binary frame stack");

  CommonOpts hdr_opts;
  int hdr_trials = 2000;
  double hdr_ratio = 8.0;
  bool hdr_dcr = false;
  auto* hdr = app.add_subcommand("analyze-hdr",
                                 "single/dual response and noise analysis");
  add_common(hdr, hdr_opts, false);
  hdr->add_option("--trials", hdr_trials, "Monte Carlo trials per grid point")
      ->capture_default_str();
  hdr->add_option("--ratio", hdr_ratio, "dual exposure ratio tau_l/tau_s")
      ->capture_default_str();
  hdr->add_flag("--dcr-fpn", hdr_dcr, "include DCR non-uniformity in the MC");

  CommonOpts scan_opts;
  std::string scan_plan = "0.6:0.036:351";
  int scan_frames = 255;
  int scan_window = 15;
  double scan_floor = 10.0;
  bool scan_save_stack = false;
  std::string scan_roi;
  auto* scan = app.add_subcommand("scan-3d", "gate scan and depth reconstruction");
  add_common(scan, scan_opts, true);
  scan->add_option("--plan", scan_plan, "gate positions start:step:count (ns)")
      ->capture_default_str();
  scan->add_option("--frames", scan_frames, "frames per gate position")
      ->capture_default_str();
  scan->add_option("--window", scan_window, "smoothing window (odd samples)")
      ->capture_default_str();
  scan->add_option("--floor", scan_floor, "edge amplitude floor (counts)")
      ->capture_default_str();
  scan->add_flag("--save-stack", scan_save_stack, "write the profile stack");
  scan->add_option("--roi", scan_roi, "evaluation ROI x:y:w:h");

  CommonOpts multi_opts;
  std::string multi_plan = "0.6:0.036:351";
  int multi_frames = 255;
  std::string multi_ranges = "0.3:0.6,0.6:0.9";
  int multi_window = 15;
  int multi_vwindow = kDefaultVirtualWindow;
  double multi_k = kDefaultEdgeSensitivity;
  double multi_floor = 10.0;
  auto* multi = app.add_subcommand("multi-object",
                                   "range-windowed multi-object reconstruction");
  add_common(multi, multi_opts, true);
  multi->add_option("--plan", multi_plan, "gate positions start:step:count (ns)")
      ->capture_default_str();
  multi->add_option("--frames", multi_frames, "frames per gate position")
      ->capture_default_str();
  multi->add_option("--ranges", multi_ranges, "range windows lo:hi[,lo:hi...] (m)")
      ->capture_default_str();
  multi->add_option("--window", multi_window, "smoothing window (odd samples)")
      ->capture_default_str();
  multi->add_option("--vwindow", multi_vwindow, "virtual gate window (samples)")
      ->capture_default_str();
  multi->add_option("-k,--sensitivity", multi_k, "edge test sensitivity")
      ->capture_default_str();
  multi->add_option("--floor", multi_floor, "edge amplitude floor (counts)")
      ->capture_default_str();

  CommonOpts dcr_opts;
  std::string dcr_samples;
  std::string dcr_temps;
  auto* dcr = app.add_subcommand("fit-dcr",
                                 "Arrhenius fit of dark count rate vs temperature");
  add_common(dcr, dcr_opts, false);
  dcr->add_option("--samples", dcr_samples, "CSV of kelvin,dcr_cps to fit");
  dcr->add_option("--temps", dcr_temps, "synthesis range lo:hi:step (kelvin)");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "re-check manifest digests");
  verify->add_option("dir", verify_dir, "output directory")->required();

  if (argc <= 1) {
    std::cout << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_maps(gen_opts);
    if (sim->parsed())
      return cmd_simulate_2d(sim_opts, sim_frames, sim_mode, sim_ratio,
                             sim_gate_position, sim_save_stack);
    if (hdr->parsed()) return cmd_analyze_hdr(hdr_opts, hdr_trials, hdr_ratio,
                                              hdr_dcr);
    if (scan->parsed())
      return cmd_scan_3d(scan_opts, scan_plan, scan_frames, scan_window,
                         scan_floor, scan_save_stack, scan_roi);
    if (multi->parsed())
      return cmd_multi_object(multi_opts, multi_plan, multi_frames, multi_ranges,
                              multi_window, multi_vwindow, multi_k, multi_floor);
    if (dcr->parsed()) return cmd_fit_dcr(dcr_opts, dcr_samples, dcr_temps);
    if (verify->parsed()) return cmd_verify(verify_dir);
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapacity;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFileError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
