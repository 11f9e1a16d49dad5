#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tco {

/// Hex SHA-256 of `content`.
std::string sha256_hex(std::string_view content);

/// Reproduction record written next to every set of output files.
struct RunManifest {
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string version;
  std::string command;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<std::string> outputs;
  std::string effective_config;

  std::string to_json() const;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace tco
