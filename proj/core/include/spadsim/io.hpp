#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spadsim/gate_profile.hpp"
#include "spadsim/hdr.hpp"
#include "spadsim/pixel_maps.hpp"
#include "spadsim/reconstruct.hpp"
#include "spadsim/scan.hpp"
#include "spadsim/simulator.hpp"

namespace spadsim {

/// File-level failure (missing file, short read, bad magic, parse error).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- CSV ---------------------------------------------------------------

/// Row-major value grid, one CSV row per pixel row.
void write_map_csv(const std::filesystem::path& path, int width, int height,
                   std::span<const float> values);
std::vector<float> read_map_csv(const std::filesystem::path& path, int& width,
                                int& height);

/// Two columns: position_ns, counts.
void write_profile_csv(const std::filesystem::path& path,
                       const IntensityProfile& profile);
IntensityProfile read_profile_csv(const std::filesystem::path& path);

void write_image_csv(const std::filesystem::path& path, const IntensityImage& img);

/// Distances in meters with 6 decimals; undetected pixels are empty cells.
void write_depth_csv(const std::filesystem::path& path, const DepthMap& map);
DepthMap read_depth_csv(const std::filesystem::path& path);

void write_noise_curve_csv(const std::filesystem::path& path,
                           const NoiseCurve& curve);

// --- Raw binary map: u32 width, u32 height, then f32 values, all LE ------

void write_map_binary(const std::filesystem::path& path, int width, int height,
                      std::span<const float> values);
std::vector<float> read_map_binary(const std::filesystem::path& path, int& width,
                                   int& height);

// --- 16-bit PGM (P5, big-endian samples per Netpbm) ----------------------

/// Values linearly quantized from [min_value, max_value] onto 1..65535; the
/// caller records the scaling (sidecar JSON) for exact recovery. Zero is
/// reserved for missing samples when a mask is given.
void write_pgm16(const std::filesystem::path& path, int width, int height,
                 std::span<const double> values, double min_value,
                 double max_value, const uint8_t* missing_mask = nullptr);
std::vector<uint16_t> read_pgm16(const std::filesystem::path& path, int& width,
                                 int& height);

// --- Frame/profile stacks -----------------------------------------------
//
// One container for both payloads: magic "SPDF", u16 version, u32 width,
// u32 height, u32 frames, u16 bits-per-pixel, all little-endian. bpp = 1
// stores binary frames packed 8 pixels/byte MSB-first with rows padded to
// whole bytes; bpp = 16 stores u16 counts row-major (gate-scan stacks, one
// "frame" per position).

struct FrameStack {
  int width = 0;
  int height = 0;
  std::vector<BinaryFrame> frames;
};

void write_frame_stack(const std::filesystem::path& path, const FrameStack& stack);
FrameStack read_frame_stack(const std::filesystem::path& path);

/// Profile stack as bpp=16 container plus a positions CSV next to it.
void write_profile_stack(const std::filesystem::path& path,
                         const std::filesystem::path& positions_csv,
                         const ProfileStack& stack);
ProfileStack read_profile_stack(const std::filesystem::path& path,
                                const std::filesystem::path& positions_csv);

}  // namespace spadsim
