#include "sra/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "sra/types.hpp"

namespace sra {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_str(const std::string& bytes) {
  return fnv1a64(bytes.data(), bytes.size());
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return fnv1a64_str(bytes);
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

std::string manifest_to_json_text(const RunManifest& m) {
  nlohmann::json j;
  j["format"] = "run-manifest";
  j["version"] = 1;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["configs"] = m.configs;
  j["seeds"] = m.seeds;
  j["inputs"] = m.input_digests;
  j["outputs"] = m.output_digests;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << manifest_to_json_text(m);
}

}  // namespace sra
