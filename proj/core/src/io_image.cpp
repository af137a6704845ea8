#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "spadsim/io.hpp"

namespace spadsim {

namespace {

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n,
                const std::filesystem::path& path) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoError("short read: " + path.string());
}

void put_u32le(std::ofstream& out, uint32_t v) {
  const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                        static_cast<uint8_t>(v >> 16),
                        static_cast<uint8_t>(v >> 24)};
  write_bytes(out, b, 4);
}

uint32_t get_u32le(std::ifstream& in, const std::filesystem::path& path) {
  uint8_t b[4];
  read_bytes(in, b, 4, path);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void write_map_binary(const std::filesystem::path& path, int width, int height,
                      std::span<const float> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  put_u32le(out, static_cast<uint32_t>(width));
  put_u32le(out, static_cast<uint32_t>(height));
  for (float v : values) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32le(out, bits);
  }
}

std::vector<float> read_map_binary(const std::filesystem::path& path, int& width,
                                   int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  width = static_cast<int>(get_u32le(in, path));
  height = static_cast<int>(get_u32le(in, path));
  if (width <= 0 || height <= 0)
    throw IoError("bad map binary header: " + path.string());
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<float> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const uint32_t bits = get_u32le(in, path);
    std::memcpy(&values[i], &bits, 4);
  }
  return values;
}

void write_pgm16(const std::filesystem::path& path, int width, int height,
                 std::span<const double> values, double min_value,
                 double max_value, const uint8_t* missing_mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "P5\n" << width << " " << height << "\n65535\n";
  const double span = max_value - min_value;
  const double scale = span > 0.0 ? (missing_mask ? 65534.0 : 65535.0) / span : 0.0;
  const double base = missing_mask ? 1.0 : 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    uint16_t q = 0;
    if (!missing_mask || missing_mask[i]) {
      const double clamped = std::clamp(values[i], min_value, max_value);
      q = static_cast<uint16_t>(
          std::lround(base + (clamped - min_value) * scale));
    }
    const uint8_t be[2] = {static_cast<uint8_t>(q >> 8), static_cast<uint8_t>(q)};
    write_bytes(out, be, 2);
  }
}

std::vector<uint16_t> read_pgm16(const std::filesystem::path& path, int& width,
                                 int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string magic;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (magic != "P5" || width <= 0 || height <= 0 || maxval != 65535)
    throw IoError("unsupported PGM header: " + path.string());
  in.get();  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<uint16_t> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    uint8_t be[2];
    read_bytes(in, be, 2, path);
    values[i] = static_cast<uint16_t>((be[0] << 8) | be[1]);
  }
  return values;
}

namespace {

constexpr char kStackMagic[4] = {'S', 'P', 'D', 'F'};
constexpr uint16_t kStackVersion = 1;

void put_u16le(std::ofstream& out, uint16_t v) {
  const uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
  write_bytes(out, b, 2);
}

uint16_t get_u16le(std::ifstream& in, const std::filesystem::path& path) {
  uint8_t b[2];
  read_bytes(in, b, 2, path);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

struct StackHeader {
  uint32_t width = 0;
  uint32_t height = 0;
  uint32_t frames = 0;
  uint16_t bpp = 0;
};

void write_stack_header(std::ofstream& out, const StackHeader& h) {
  write_bytes(out, kStackMagic, 4);
  put_u16le(out, kStackVersion);
  put_u32le(out, h.width);
  put_u32le(out, h.height);
  put_u32le(out, h.frames);
  put_u16le(out, h.bpp);
}

StackHeader read_stack_header(std::ifstream& in,
                              const std::filesystem::path& path) {
  char magic[4];
  read_bytes(in, magic, 4, path);
  if (std::memcmp(magic, kStackMagic, 4) != 0)
    throw IoError("bad stack magic: " + path.string());
  const uint16_t version = get_u16le(in, path);
  if (version != kStackVersion)
    throw IoError("unsupported stack version: " + path.string());
  StackHeader h;
  h.width = get_u32le(in, path);
  h.height = get_u32le(in, path);
  h.frames = get_u32le(in, path);
  h.bpp = get_u16le(in, path);
  if (h.width == 0 || h.height == 0)
    throw IoError("bad stack dimensions: " + path.string());
  return h;
}

}  // namespace

void write_frame_stack(const std::filesystem::path& path, const FrameStack& stack) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  StackHeader h;
  h.width = static_cast<uint32_t>(stack.width);
  h.height = static_cast<uint32_t>(stack.height);
  h.frames = static_cast<uint32_t>(stack.frames.size());
  h.bpp = 1;
  write_stack_header(out, h);
  for (const auto& frame : stack.frames)
    write_bytes(out, frame.bytes.data(), frame.bytes.size());
}

FrameStack read_frame_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  const StackHeader h = read_stack_header(in, path);
  if (h.bpp != 1) throw IoError("not a binary frame stack: " + path.string());
  FrameStack stack;
  stack.width = static_cast<int>(h.width);
  stack.height = static_cast<int>(h.height);
  stack.frames.reserve(h.frames);
  for (uint32_t f = 0; f < h.frames; ++f) {
    BinaryFrame frame = BinaryFrame::zeros(stack.width, stack.height);
    read_bytes(in, frame.bytes.data(), frame.bytes.size(), path);
    stack.frames.push_back(std::move(frame));
  }
  return stack;
}

void write_profile_stack(const std::filesystem::path& path,
                         const std::filesystem::path& positions_csv,
                         const ProfileStack& stack) {
  stack.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  StackHeader h;
  h.width = static_cast<uint32_t>(stack.width);
  h.height = static_cast<uint32_t>(stack.height);
  h.frames = static_cast<uint32_t>(stack.position_count());
  h.bpp = 16;
  write_stack_header(out, h);
  // Per-position images row-major, u16 counts.
  const std::size_t npos = stack.position_count();
  for (std::size_t i = 0; i < npos; ++i)
    for (std::size_t px = 0; px < stack.pixel_count(); ++px) {
      const double v = stack.counts[px * npos + i];
      put_u16le(out, static_cast<uint16_t>(std::lround(
                         std::clamp(v, 0.0, 65535.0))));
    }

  std::ofstream pos_out(positions_csv, std::ios::binary);
  if (!pos_out)
    throw IoError("cannot open for writing: " + positions_csv.string());
  pos_out << "position_ns,frames\n";
  char buf[64];
  for (double p : stack.positions_ns) {
    std::snprintf(buf, sizeof buf, "%.9g,%d\n", p, stack.frames_per_position);
    pos_out << buf;
  }
}

ProfileStack read_profile_stack(const std::filesystem::path& path,
                                const std::filesystem::path& positions_csv) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  const StackHeader h = read_stack_header(in, path);
  if (h.bpp != 16) throw IoError("not a profile stack: " + path.string());

  const IntensityProfile positions = read_profile_csv(positions_csv);
  if (positions.size() != h.frames)
    throw IoError("positions CSV does not match stack: " + positions_csv.string());

  ProfileStack stack;
  stack.width = static_cast<int>(h.width);
  stack.height = static_cast<int>(h.height);
  stack.positions_ns = positions.positions_ns;
  stack.frames_per_position = static_cast<int>(std::lround(positions.counts[0]));
  stack.counts.assign(stack.pixel_count() * stack.position_count(), 0.0f);
  const std::size_t npos = stack.position_count();
  for (std::size_t i = 0; i < npos; ++i)
    for (std::size_t px = 0; px < stack.pixel_count(); ++px)
      stack.counts[px * npos + i] = static_cast<float>(get_u16le(in, path));
  return stack;
}

}  // namespace spadsim
