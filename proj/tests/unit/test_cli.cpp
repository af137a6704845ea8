#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spadsim/io.hpp"
#include "spadsim/manifest.hpp"

using namespace spadsim;
namespace fs = std::filesystem;

namespace {

const char* kTool = SPADSIM_TOOL_PATH;

int run(const std::string& args) {
  const std::string cmd = std::string(kTool) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / (std::string("spadsim_cli_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_small_config(const fs::path& path) {
  std::ofstream(path) << R"({
    "sensor": {"width": 16, "height": 16, "crosstalk_p": 0.0},
    "dcr": {"median_cps": 0.0}
  })";
}

void write_flat_scene(const fs::path& path) {
  std::ofstream(path) << R"({
    "objects": [{"type": "flat", "distance_m": 0.6, "amplitude": 0.5}]
  })";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("no arguments prints usage and fails") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("missing input files give the file status") {
  const auto dir = temp_dir("missing");
  CHECK(run("gen-maps --config /nonexistent.json --out " + (dir / "o").string()) ==
        3);
  fs::remove_all(dir);
}

TEST_CASE("invalid config gives the validation status") {
  const auto dir = temp_dir("invalid");
  std::ofstream(dir / "bad.json") << R"({"dcr": {"median_cps": -2}})";
  CHECK(run("gen-maps --config " + (dir / "bad.json").string() + " --out " +
            (dir / "o").string()) == 4);
  fs::remove_all(dir);
}

TEST_CASE("capacity violations give the capacity status") {
  const auto dir = temp_dir("capacity");
  write_small_config(dir / "cfg.json");
  write_flat_scene(dir / "scene.json");
  CHECK(run("simulate-2d --config " + (dir / "cfg.json").string() + " --frames 5000 --out " +
            (dir / "o").string()) == 5);
  fs::remove_all(dir);
}

TEST_CASE("scan-3d end to end with manifest verification") {
  const auto dir = temp_dir("scan3d");
  write_small_config(dir / "cfg.json");
  write_flat_scene(dir / "scene.json");
  const auto out = dir / "out";
  const std::string args = "scan-3d --config " + (dir / "cfg.json").string() +
                           " --scene " + (dir / "scene.json").string() +
                           " --out " + out.string() +
                           " --plan 0.6:0.036:200 --frames 64 --seed 5" +
                           " --save-stack --roi 4:4:8:8";
  REQUIRE(run(args) == 0);
  CHECK(fs::exists(out / "depth.csv"));
  CHECK(fs::exists(out / "depth.pgm"));
  CHECK(fs::exists(out / "depth_scale.json"));
  CHECK(fs::exists(out / "stack.spdf"));
  CHECK(fs::exists(out / "positions.csv"));
  CHECK(fs::exists(out / "eval.csv"));
  CHECK(fs::exists(out / "manifest.json"));

  CHECK(verify_manifest(out));
  CHECK(run("verify " + out.string()) == 0);

  // Depth lands near the true 0.6 m target.
  const auto depth = read_depth_csv(out / "depth.csv");
  double sum = 0.0;
  int n = 0;
  for (std::size_t px = 0; px < depth.distance_m.size(); ++px)
    if (depth.detected[px]) {
      sum += depth.distance_m[px];
      ++n;
    }
  REQUIRE(n > 200);
  CHECK(sum / n == doctest::Approx(0.6).epsilon(0.03));

  // Tampering with an input breaks verification.
  std::ofstream(dir / "scene.json", std::ios::app) << "\n";
  CHECK(run("verify " + out.string()) == 6);
  fs::remove_all(dir);
}

TEST_CASE("identical runs give byte-identical outputs") {
  const auto dir = temp_dir("repro");
  write_small_config(dir / "cfg.json");
  write_flat_scene(dir / "scene.json");
  const std::string base = "scan-3d --config " + (dir / "cfg.json").string() +
                           " --scene " + (dir / "scene.json").string() +
                           " --plan 0.6:0.036:120 --frames 32 --seed 9 --out ";
  REQUIRE(run(base + (dir / "a").string() + " --threads 1") == 0);
  REQUIRE(run(base + (dir / "b").string() + " --threads 4") == 0);
  for (const char* name : {"depth.csv", "depth.pgm", "manifest.json"}) {
    std::ifstream fa(dir / "a" / name, std::ios::binary);
    std::ifstream fb(dir / "b" / name, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CAPTURE(name);
    CHECK(sa == sb);
  }
  fs::remove_all(dir);
}

TEST_CASE("gen-maps writes maps, histograms and stats") {
  const auto dir = temp_dir("genmaps");
  const auto out = dir / "out";
  std::ofstream(dir / "cfg.json") << R"({
    "sensor": {"width": 48, "height": 48},
    "skew": {"position_fwhm_ns": 0.410, "length_fwhm_ns": 0.120}
  })";
  REQUIRE(run("gen-maps --config " + (dir / "cfg.json").string() + " --out " +
              out.string()) == 0);
  for (const char* name :
       {"position_map.csv", "position_map.bin", "length_map.csv",
        "length_map.bin", "position_hist.csv", "length_hist.csv",
        "gate_stats.json", "manifest.json"})
    CHECK(fs::exists(out / name));

  int w = 0, h = 0;
  const auto csv = read_map_csv(out / "position_map.csv", w, h);
  const auto bin = read_map_binary(out / "position_map.bin", w, h);
  CHECK(w == 48);
  CHECK(h == 48);
  REQUIRE(csv.size() == bin.size());
  for (std::size_t i = 0; i < csv.size(); ++i)
    CHECK(csv[i] == doctest::Approx(bin[i]).epsilon(1e-6));

  std::ifstream in(out / "gate_stats.json");
  const auto stats = nlohmann::json::parse(in);
  CHECK(stats["position_fwhm_ns"].get<double>() ==
        doctest::Approx(0.410).epsilon(0.05));
  fs::remove_all(dir);
}

TEST_CASE("analyze-hdr writes curves and a summary") {
  const auto dir = temp_dir("hdr");
  const auto out = dir / "out";
  REQUIRE(run("analyze-hdr --trials 200 --out " + out.string()) == 0);
  for (const char* name :
       {"noise_single_analytic.csv", "noise_single_mc.csv",
        "noise_dual_analytic.csv", "noise_dual_mc.csv", "summary.json"})
    CHECK(fs::exists(out / name));
  std::ifstream in(out / "summary.json");
  const auto summary = nlohmann::json::parse(in);
  CHECK(summary["single"]["dr_db"].get<double>() > 90.0);
  CHECK(summary["dr_improvement_db"].get<double>() > 10.0);
  fs::remove_all(dir);
}

TEST_CASE("multi-object writes one depth map per range") {
  const auto dir = temp_dir("multi");
  write_small_config(dir / "cfg.json");
  std::ofstream(dir / "scene.json") << R"({
    "objects": [
      {"type": "sphere", "distance_m": 0.75, "amplitude": 0.5, "radius_m": 0.12},
      {"type": "plate", "distance_m": 0.45, "amplitude": 0.2, "transmittance": 0.9}
    ]
  })";
  const auto out = dir / "out";
  REQUIRE(run("multi-object --config " + (dir / "cfg.json").string() +
              " --scene " + (dir / "scene.json").string() + " --out " +
              out.string() +
              " --plan 0.0:0.036:240 --frames 64 --ranges 0.3:0.6,0.6:0.9") == 0);
  CHECK(fs::exists(out / "depth_range_0.csv"));
  CHECK(fs::exists(out / "depth_range_1.csv"));
  const auto plate = read_depth_csv(out / "depth_range_0.csv");
  std::size_t hits = 0;
  for (uint8_t d : plate.detected) hits += d;
  CHECK(hits > plate.detected.size() / 2);
  fs::remove_all(dir);
}

TEST_CASE("fit-dcr round trip through the CLI") {
  const auto dir = temp_dir("fitdcr");
  const auto out = dir / "out";
  REQUIRE(run("fit-dcr --out " + out.string()) == 0);
  CHECK(fs::exists(out / "dcr_samples.csv"));
  CHECK(fs::exists(out / "fit.json"));
  std::ifstream in(out / "fit.json");
  const auto fit = nlohmann::json::parse(in);
  CHECK(fit["activation_energy_ev"].get<double>() ==
        doctest::Approx(1.1).epsilon(1e-6));
  fs::remove_all(dir);
}

}  // TEST_SUITE
