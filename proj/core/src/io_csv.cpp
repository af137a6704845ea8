#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spadsim/io.hpp"

namespace spadsim {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, const std::filesystem::path& path) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{})
    throw IoError("bad numeric cell '" + cell + "' in " + path.string());
  return value;
}

}  // namespace

void write_map_csv(const std::filesystem::path& path, int width, int height,
                   std::span<const float> values) {
  auto out = open_out(path);
  char buf[64];
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::snprintf(buf, sizeof buf, "%.9g",
                    values[static_cast<std::size_t>(y) * width + x]);
      out << buf << (x + 1 == width ? "" : ",");
    }
    out << '\n';
  }
}

std::vector<float> read_map_csv(const std::filesystem::path& path, int& width,
                                int& height) {
  auto in = open_in(path);
  std::vector<float> values;
  std::string line;
  width = -1;
  height = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (width < 0)
      width = static_cast<int>(cells.size());
    else if (static_cast<int>(cells.size()) != width)
      throw IoError("ragged CSV rows in " + path.string());
    for (const auto& cell : cells)
      values.push_back(static_cast<float>(parse_double(cell, path)));
    ++height;
  }
  if (width <= 0 || height <= 0) throw IoError("empty map CSV: " + path.string());
  return values;
}

void write_profile_csv(const std::filesystem::path& path,
                       const IntensityProfile& profile) {
  auto out = open_out(path);
  out << "position_ns,counts\n";
  char buf[96];
  for (std::size_t i = 0; i < profile.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", profile.positions_ns[i],
                  profile.counts[i]);
    out << buf;
  }
}

IntensityProfile read_profile_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  IntensityProfile profile;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("position_ns", 0) == 0) continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) throw IoError("bad profile row in " + path.string());
    profile.positions_ns.push_back(parse_double(cells[0], path));
    profile.counts.push_back(parse_double(cells[1], path));
  }
  profile.validate();
  return profile;
}

void write_image_csv(const std::filesystem::path& path, const IntensityImage& img) {
  auto out = open_out(path);
  char buf[64];
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::snprintf(buf, sizeof buf, "%.9g",
                    img.counts[static_cast<std::size_t>(y) * img.width + x]);
      out << buf << (x + 1 == img.width ? "" : ",");
    }
    out << '\n';
  }
}

void write_depth_csv(const std::filesystem::path& path, const DepthMap& map) {
  auto out = open_out(path);
  char buf[64];
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const std::size_t px = static_cast<std::size_t>(y) * map.width + x;
      if (map.detected[px]) {
        std::snprintf(buf, sizeof buf, "%.6f", map.distance_m[px]);
        out << buf;
      }
      if (x + 1 != map.width) out << ',';
    }
    out << '\n';
  }
}

DepthMap read_depth_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  DepthMap map;
  std::string line;
  int width = -1;
  std::vector<float> dist;
  std::vector<uint8_t> det;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    const auto cells = split_csv_line(line);
    if (width < 0)
      width = static_cast<int>(cells.size());
    else if (static_cast<int>(cells.size()) != width)
      throw IoError("ragged depth CSV rows in " + path.string());
    for (const auto& cell : cells) {
      bool blank = true;
      for (char c : cell)
        if (c != ' ' && c != '\t' && c != '\r') blank = false;
      if (blank) {
        dist.push_back(0.0f);
        det.push_back(0);
      } else {
        dist.push_back(static_cast<float>(parse_double(cell, path)));
        det.push_back(1);
      }
    }
    ++map.height;
  }
  if (width <= 0 || map.height <= 0)
    throw IoError("empty depth CSV: " + path.string());
  map.width = width;
  map.distance_m = std::move(dist);
  map.detected = std::move(det);
  return map;
}

void write_noise_curve_csv(const std::filesystem::path& path,
                           const NoiseCurve& curve) {
  auto out = open_out(path);
  out << "n_in,mean_out,std_raw,std_corrected,snr_db,mode,provenance\n";
  const char* mode =
      curve.params.mode == ResponseParams::Mode::single ? "single" : "dual";
  const char* prov =
      curve.provenance == CurveProvenance::analytic ? "analytic" : "monte-carlo";
  char buf[192];
  for (const auto& pt : curve.points) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%s,%s\n", pt.n_in,
                  pt.mean_out, pt.std_raw, pt.std_corrected, pt.snr_db, mode,
                  prov);
    out << buf;
  }
}

}  // namespace spadsim
