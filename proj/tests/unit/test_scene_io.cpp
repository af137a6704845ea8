#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "spadsim/config_io.hpp"
#include "spadsim/io.hpp"
#include "spadsim/manifest.hpp"
#include "spadsim/rng.hpp"
#include "spadsim/scene.hpp"

using namespace spadsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("spadsim_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("scene_io") {

TEST_CASE("flat target rasterizes to one return per pixel") {
  SceneSpec spec;
  spec.objects.push_back({SceneObject::Kind::flat, 0.75, 0.5, 0.0, 0.0, 0.0, 0.0});
  const auto scene = rasterize_scene(spec, 16, 16);
  for (std::size_t px = 0; px < scene.pixel_count(); ++px) {
    const auto rets = scene.returns_at(px);
    REQUIRE(rets.size() == 1);
    CHECK(rets[0].amplitude == doctest::Approx(0.5));
    CHECK(rets[0].delay_ns == doctest::Approx(5.0035).epsilon(1e-4));
  }
  REQUIRE(scene.truth_m.has_value());
  CHECK((*scene.truth_m)[0] == doctest::Approx(0.75f));
}

TEST_CASE("plate in front of a sphere doubles the returns") {
  SceneSpec spec;
  // Declaration order resolves occlusion: the plate, declared later, filters
  // the sphere by its squared transmittance.
  spec.objects.push_back(
      {SceneObject::Kind::sphere, 0.75, 0.5, 0.0, 0.12, 0.0, 0.0});
  spec.objects.push_back({SceneObject::Kind::plate, 0.45, 0.2, 0.9, 0.0, 0.0, 0.0});
  const auto scene = rasterize_scene(spec, 64, 64);

  // The array center falls between pixels; the nearest pixel ray grazes the
  // front pole within a fraction of a millimeter.
  const std::size_t center = 32 * 64 + 32;
  const auto rets = scene.returns_at(center);
  REQUIRE(rets.size() == 2);
  CHECK(rets[0].amplitude == doctest::Approx(0.5 * 0.81));
  CHECK(rets[0].delay_ns ==
        doctest::Approx(distance_to_delay_ns(0.75)).epsilon(1e-3));
  CHECK(rets[0].delay_ns >= distance_to_delay_ns(0.75));
  CHECK(rets[1].amplitude == doctest::Approx(0.2));

  // A corner pixel misses the sphere and sees the plate only.
  const auto corner = scene.returns_at(0);
  REQUIRE(corner.size() == 1);
  CHECK(corner[0].amplitude == doctest::Approx(0.2));

  // Sphere depth grows toward the rim.
  bool has_deeper = false;
  for (std::size_t px = 0; px < scene.pixel_count(); ++px) {
    const auto r = scene.returns_at(px);
    if (r.size() == 2 && r[0].delay_ns > distance_to_delay_ns(0.76))
      has_deeper = true;
  }
  CHECK(has_deeper);
}

TEST_CASE("empty scene and explicit returns") {
  const auto empty = rasterize_scene(SceneSpec{}, 8, 8);
  for (std::size_t px = 0; px < empty.pixel_count(); ++px)
    CHECK(empty.returns_at(px).empty());

  SceneSpec spec;
  spec.extra_returns.push_back({3, 5, 2.5, 7.0});
  const auto scene = rasterize_scene(spec, 8, 8);
  CHECK(scene.returns_at(5 * 8 + 3).size() == 1);
  CHECK(scene.returns_at(0).empty());

  SceneSpec bad;
  bad.extra_returns.push_back({9, 0, 1.0, 1.0});
  CHECK_THROWS_AS(rasterize_scene(bad, 8, 8), std::invalid_argument);
}

TEST_CASE("map CSV and binary round trips") {
  const auto dir = temp_dir();
  std::vector<float> values(24 * 17);
  RandomStream rng(61, 0, 0);
  for (auto& v : values) v = static_cast<float>(rng.uniform() * 10.0 - 5.0);

  write_map_csv(dir / "m.csv", 24, 17, values);
  int w = 0, h = 0;
  const auto csv = read_map_csv(dir / "m.csv", w, h);
  CHECK(w == 24);
  CHECK(h == 17);
  REQUIRE(csv.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    CHECK(csv[i] == doctest::Approx(values[i]).epsilon(1e-6));

  write_map_binary(dir / "m.bin", 24, 17, values);
  const auto bin = read_map_binary(dir / "m.bin", w, h);
  CHECK(bin == values);  // exact: raw f32

  CHECK_THROWS_AS(read_map_binary(dir / "missing.bin", w, h), IoError);
  fs::remove_all(dir);
}

TEST_CASE("profile CSV round trip") {
  const auto dir = temp_dir();
  IntensityProfile p;
  for (int i = 0; i < 40; ++i) {
    p.positions_ns.push_back(0.6 + i * 0.036);
    p.counts.push_back(i * 1.5);
  }
  write_profile_csv(dir / "p.csv", p);
  const auto back = read_profile_csv(dir / "p.csv");
  REQUIRE(back.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(back.positions_ns[i] == doctest::Approx(p.positions_ns[i]));
    CHECK(back.counts[i] == doctest::Approx(p.counts[i]));
  }
  fs::remove_all(dir);
}

TEST_CASE("depth CSV keeps no-detection cells empty") {
  const auto dir = temp_dir();
  DepthMap map;
  map.width = 5;
  map.height = 3;
  map.lsb_m = 0.0054;
  map.distance_m.assign(15, 0.0f);
  map.detected.assign(15, 0);
  map.distance_m[7] = 0.453210f;
  map.detected[7] = 1;
  map.distance_m[14] = 1.234567f;
  map.detected[14] = 1;

  write_depth_csv(dir / "d.csv", map);
  const auto back = read_depth_csv(dir / "d.csv");
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.detected == map.detected);
  CHECK(back.distance_m[7] == doctest::Approx(0.453210).epsilon(1e-6));
  CHECK(back.distance_m[14] == doctest::Approx(1.234567).epsilon(1e-6));
  fs::remove_all(dir);
}

TEST_CASE("16-bit PGM") {
  const auto dir = temp_dir();
  std::vector<double> values{0.0, 100.0, 200.0, 300.0, 400.0, 500.0};
  write_pgm16(dir / "img.pgm", 3, 2, values, 0.0, 500.0);
  int w = 0, h = 0;
  const auto back = read_pgm16(dir / "img.pgm", w, h);
  CHECK(w == 3);
  CHECK(h == 2);
  CHECK(back[0] == 0);
  CHECK(back[5] == 65535);
  CHECK(back[1] == doctest::Approx(65535.0 * 100.0 / 500.0).epsilon(1e-4));
  fs::remove_all(dir);
}

TEST_CASE("binary frame stack round trip") {
  const auto dir = temp_dir();
  FrameStack stack;
  stack.width = 13;  // deliberately not byte aligned
  stack.height = 5;
  RandomStream rng(62, 0, 0);
  for (int f = 0; f < 4; ++f) {
    auto frame = BinaryFrame::zeros(13, 5);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 13; ++x)
        if (rng.uniform() < 0.3) frame.set(x, y);
    stack.frames.push_back(frame);
  }
  write_frame_stack(dir / "s.spdf", stack);
  const auto back = read_frame_stack(dir / "s.spdf");
  CHECK(back.width == 13);
  CHECK(back.height == 5);
  REQUIRE(back.frames.size() == 4);
  for (int f = 0; f < 4; ++f) CHECK(back.frames[f].bytes == stack.frames[f].bytes);
  fs::remove_all(dir);
}

TEST_CASE("profile stack round trip") {
  const auto dir = temp_dir();
  ProfileStack stack;
  stack.width = 6;
  stack.height = 4;
  stack.frames_per_position = 255;
  for (int i = 0; i < 12; ++i) stack.positions_ns.push_back(0.6 + i * 0.036);
  stack.counts.assign(stack.pixel_count() * 12, 0.0f);
  RandomStream rng(63, 0, 0);
  for (auto& c : stack.counts)
    c = static_cast<float>(rng.poisson(40.0));

  write_profile_stack(dir / "ps.spdf", dir / "pos.csv", stack);
  const auto back = read_profile_stack(dir / "ps.spdf", dir / "pos.csv");
  CHECK(back.width == 6);
  CHECK(back.height == 4);
  CHECK(back.frames_per_position == 255);
  CHECK(back.counts == stack.counts);
  for (std::size_t i = 0; i < 12; ++i)
    CHECK(back.positions_ns[i] == doctest::Approx(stack.positions_ns[i]));
  fs::remove_all(dir);
}

TEST_CASE("config defaults, validation and round trip") {
  const auto dir = temp_dir();

  SUBCASE("minimal file gets the documented defaults") {
    std::ofstream(dir / "min.json") << "{}\n";
    const auto config = load_config(dir / "min.json");
    CHECK(config.width == 64);
    CHECK(config.gate.length_ns == doctest::Approx(3.8));
    CHECK(config.gate.rise_ns == doctest::Approx(0.55));
    CHECK(config.n_sat == 4080);
    CHECK(config.crosstalk_p == doctest::Approx(0.0039));
    CHECK(config.dcr_cps[0] == doctest::Approx(2.0f));
    CHECK(config.frame_exposure_ns == doctest::Approx(41666.67).epsilon(1e-4));
  }

  SUBCASE("negative dcr names the field") {
    std::ofstream(dir / "bad.json") << R"({"dcr": {"median_cps": -1.0}})";
    try {
      load_config(dir / "bad.json");
      FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("median_cps") != std::string::npos);
    }
  }

  SUBCASE("parse errors report the position") {
    std::ofstream(dir / "broken.json") << "{\"sensor\": {";
    try {
      load_config(dir / "broken.json");
      FAIL("expected a parse error");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
    }
  }

  SUBCASE("save and reload reproduce the sensor exactly") {
    ConfigSpec spec;
    spec.width = 32;
    spec.height = 24;
    spec.skew.position_fwhm_ns = 0.410;
    spec.skew.length_fwhm_ns = 0.120;
    spec.dcr_spread = true;
    spec.crosstalk_p = 0.0017;
    save_config(dir / "cfg.json", spec);
    const auto loaded = load_config_spec(dir / "cfg.json");
    const auto a = spec.build();
    const auto b = loaded.build();
    CHECK(a.maps.position_ns == b.maps.position_ns);
    CHECK(a.maps.length_ns == b.maps.length_ns);
    CHECK(a.dcr_cps == b.dcr_cps);
    CHECK(a.crosstalk_p == b.crosstalk_p);
    CHECK(a.dcr_temperature.diffusion_prefactor_cps ==
          doctest::Approx(b.dcr_temperature.diffusion_prefactor_cps));
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_config(dir / "nope.json"), IoError);
  }
  fs::remove_all(dir);
}

TEST_CASE("scene file round trip") {
  const auto dir = temp_dir();
  SceneSpec spec;
  spec.ambient_per_ns = 0.001;
  spec.objects.push_back(
      {SceneObject::Kind::sphere, 0.75, 0.5, 0.0, 0.12, 1.0, -2.0});
  spec.objects.push_back({SceneObject::Kind::plate, 0.45, 0.2, 0.9, 0.0, 0.0, 0.0});
  save_scene(dir / "scene.json", spec);
  const auto back = load_scene_spec(dir / "scene.json");
  REQUIRE(back.objects.size() == 2);
  CHECK(back.objects[0].kind == SceneObject::Kind::sphere);
  CHECK(back.objects[0].radius_m == doctest::Approx(0.12));
  CHECK(back.objects[1].transmittance == doctest::Approx(0.9));
  CHECK(back.ambient_per_ns == doctest::Approx(0.001));

  const auto scene = load_scene(dir / "scene.json", 32, 32);
  CHECK(scene.width == 32);

  std::ofstream(dir / "badscene.json") << R"({"objects": [{"type": "cube"}]})";
  CHECK_THROWS_AS(load_scene(dir / "badscene.json", 8, 8), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("manifest digests") {
  const auto dir = temp_dir();
  std::ofstream(dir / "input.txt") << "payload v1\n";

  RunManifest m;
  m.command = "test";
  m.seed = 99;
  m.inputs.emplace_back((dir / "input.txt").string(),
                        sha256_file(dir / "input.txt"));
  write_manifest(dir, m);

  const auto back = read_manifest(dir);
  CHECK(back.command == "test");
  CHECK(back.seed == 99);
  CHECK(verify_manifest(dir));

  std::ofstream(dir / "input.txt") << "tampered\n";
  std::string diagnostic;
  CHECK(!verify_manifest(dir, &diagnostic));
  CHECK(diagnostic.find("mismatch") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sha256 known answer") {
  const auto dir = temp_dir();
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(dir);
}

}  // TEST_SUITE
