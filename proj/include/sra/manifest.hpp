#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

namespace sra {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_str(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string digest_hex(std::uint64_t digest);

// Reproducibility record written next to every command's outputs. Two runs
// whose manifests agree on command, configs, seeds, and input digests must
// produce outputs with identical digests.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> configs;         // role -> path
  std::map<std::string, std::uint64_t> seeds;         // name -> value
  std::map<std::string, std::string> input_digests;   // path -> fnv-1a64 hex
  std::map<std::string, std::string> output_digests;  // path -> fnv-1a64 hex
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
};

std::string manifest_to_json_text(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace sra
