#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "qpsense/config.hpp"

namespace qpsense {

#ifndef QPSENSE_VERSION
#define QPSENSE_VERSION "0.0.0"
#endif

/// Provenance block embedded in every report. Re-running the same command
/// with the same config and seed reproduces the report byte for byte;
/// timestamp_unix stays 0 unless explicitly stamped, since wall-clock
/// stamps would break that.
struct RunManifest {
  std::string command;
  std::string version = QPSENSE_VERSION;
  bool seeded = false;
  std::uint64_t seed = 0;
  std::int64_t timestamp_unix = 0;
  std::map<std::string, std::string> config;

  static RunManifest for_command(const std::string& command,
                                 const Config& cfg);
  nlohmann::json to_json() const;
};

/// Writes content via a temporary file and rename, so readers never see a
/// partial report.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qpsense
