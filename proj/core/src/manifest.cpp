#include "spadsim/manifest.hpp"

#include <fstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "spadsim/constants.hpp"
#include "spadsim/io.hpp"

namespace spadsim {

using nlohmann::json;

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path.string());

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 init failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const auto got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw IoError("sha256 update failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 final failed");
  }
  EVP_MD_CTX_free(ctx);

  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

void write_manifest(const std::filesystem::path& out_dir,
                    const RunManifest& manifest) {
  json root;
  root["command"] = manifest.command;
  root["seed"] = manifest.seed;
  root["tool_version"] =
      manifest.tool_version.empty() ? kToolVersion : manifest.tool_version;
  root["inputs"] = json::array();
  for (const auto& [path, digest] : manifest.inputs)
    root["inputs"].push_back({{"path", path}, {"sha256", digest}});

  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out)
    throw IoError("cannot open for writing: " +
                  (out_dir / "manifest.json").string());
  out << root.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& out_dir) {
  const auto path = out_dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  RunManifest m;
  m.command = root.value("command", "");
  m.seed = root.value("seed", uint64_t{0});
  m.tool_version = root.value("tool_version", "");
  if (root.contains("inputs"))
    for (const auto& entry : root["inputs"])
      m.inputs.emplace_back(entry.value("path", ""), entry.value("sha256", ""));
  return m;
}

bool verify_manifest(const std::filesystem::path& out_dir, std::string* diagnostic) {
  const RunManifest m = read_manifest(out_dir);
  for (const auto& [path, recorded] : m.inputs) {
    std::string actual;
    try {
      actual = sha256_file(path);
    } catch (const IoError& e) {
      if (diagnostic) *diagnostic = e.what();
      return false;
    }
    if (actual != recorded) {
      if (diagnostic)
        *diagnostic = "digest mismatch for " + path + ": recorded " + recorded +
                      ", actual " + actual;
      return false;
    }
  }
  return true;
}

}  // namespace spadsim
