#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace spadsim {

/// Reproducibility record written next to every stochastic output: the
/// command, its seed, and content digests of the inputs. Contains nothing
/// run-dependent (no timestamps, no thread counts), so identical runs write
/// identical manifests.
struct RunManifest {
  std::string command;
  uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::pair<std::string, std::string>> inputs;  ///< path, sha256
};

std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& out_dir,
                    const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& out_dir);

/// Re-hashes the recorded inputs. Returns true when all digests match;
/// otherwise fills diagnostic with the first mismatch.
bool verify_manifest(const std::filesystem::path& out_dir,
                     std::string* diagnostic = nullptr);

}  // namespace spadsim
