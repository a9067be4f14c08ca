// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "softcreep/csv.hpp"
#include "softcreep/errors.hpp"
#include "softcreep/version.hpp"

namespace softcreep {

// 64-bit FNV-1a over raw bytes; stable across platforms and good enough
// for change detection (not for security).
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int j = 15; j >= 0; --j) {
    out[static_cast<std::size_t>(j)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string() + " for hashing");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return hex64(fnv1a64(bytes));
}

// Record of one command run. Written to manifest.json strictly after
// all other outputs, so its presence certifies a complete run.
struct ResultManifest {
  std::string command;
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;
  struct Output {
    std::string file;
    std::uintmax_t size = 0;
  };
  std::vector<Output> outputs;
  std::string version = kVersion;
  double duration_s = 0.0;

  // Registers a just-written output, capturing its on-disk size.
  void record_output(const std::filesystem::path& dir, const std::string& file) {
    outputs.push_back({file, std::filesystem::file_size(dir / file)});
  }
};

// Verifies the recorded outputs against the directory and writes
// manifest.json. Call this last; everything listed must already be in
// place with the recorded size.
inline void write_manifest(const std::filesystem::path& dir,
                           const ResultManifest& manifest) {
  for (const auto& out : manifest.outputs) {
    const auto path = dir / out.file;
    if (!std::filesystem::exists(path))
      throw DataError("manifest lists missing output " + path.string());
    if (std::filesystem::file_size(path) != out.size)
      throw DataError("manifest size mismatch for " + path.string());
  }
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config_hash"] = manifest.config_hash;
  j["inputs"] = manifest.input_hashes;
  j["outputs"] = nlohmann::json::array();
  for (const auto& out : manifest.outputs)
    j["outputs"].push_back({{"file", out.file}, {"size", out.size}});
  j["version"] = manifest.version;
  j["duration_s"] = manifest.duration_s;
  atomic_write(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace softcreep
