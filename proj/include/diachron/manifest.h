#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace diachron {

inline constexpr const char *kToolVersion = "0.3.0";

// Provenance record written next to every output of a CLI run.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex
  uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> metadata;
};

// Hex SHA-256 of a file; a directory hashes its regular files in name order.
std::string sha256_hex(const std::filesystem::path &path);

std::filesystem::path manifest_path_for(const std::filesystem::path &output);
void write_manifest(const RunManifest &manifest, const std::filesystem::path &path);

// Flat "key = value" configuration; '#' starts a comment line.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path &path);

}  // namespace diachron
