#include "chipletrank/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "chipletrank/error.hpp"

#ifndef CHIPLETRANK_VERSION
#define CHIPLETRANK_VERSION "0.0.0"
#endif

namespace chipletrank {

std::string tool_version() { return CHIPLETRANK_VERSION; }

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return "fnv1a64:" + fnv1a64_hex(bytes);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json doc;
  doc["command"] = m.command;
  doc["arguments"] = m.arguments;
  doc["config_hash"] = m.config_hash;
  doc["seeds"] = m.seeds;
  doc["input_digests"] = m.input_digests;
  doc["outputs"] = m.outputs;
  doc["tool_version"] = m.tool_version;
  doc["started_at"] = m.started_at;
  doc["finished_at"] = m.finished_at;
  return doc.dump(2) + "\n";
}

std::filesystem::path manifest_path(const std::filesystem::path& artifact) {
  std::filesystem::path p = artifact;
  p += ".manifest.json";
  return p;
}

void write_manifest(const std::filesystem::path& artifact, const RunManifest& manifest) {
  const auto path = manifest_path(artifact);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << manifest_to_json(manifest);
}

}  // namespace chipletrank
