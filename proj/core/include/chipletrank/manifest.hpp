#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace chipletrank {

std::string tool_version();

std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// UTC, ISO-8601, second resolution.
std::string utc_timestamp();

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_hash;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> input_digests;  // path -> digest
  std::vector<std::string> outputs;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
};

std::string manifest_to_json(const RunManifest& manifest);

/// `<artifact>.manifest.json` next to the artifact.
std::filesystem::path manifest_path(const std::filesystem::path& artifact);
void write_manifest(const std::filesystem::path& artifact, const RunManifest& manifest);

}  // namespace chipletrank
