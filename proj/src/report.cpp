#include "qpsense/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qpsense {

RunManifest RunManifest::for_command(const std::string& command,
                                     const Config& cfg) {
  RunManifest m;
  m.command = command;
  for (const auto& [k, v] : cfg.entries()) {
    m.config[k] = v;
  }
  return m;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version;
  j["seeded"] = seeded;
  if (seeded) j["seed"] = seed;
  j["timestamp_unix"] = timestamp_unix;
  j["config"] = config;
  return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write file: " + tmp);
    }
    out << content;
    if (!out.good()) {
      throw std::runtime_error("short write: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace qpsense
