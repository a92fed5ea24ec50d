#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace qpsense {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Key-value configuration with [section] headers; keys are addressed as
/// "section.key". Units are carried in the key names (power_uw, rbw_hz).
///
///   # comment
///   [analyzer]
///   rbw_hz = 100
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text,
                            const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;

  /// Inserts or overrides an entry (command-line precedence).
  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::string require(const std::string& key) const;
  std::map<std::string, std::string> entries_;
  std::string origin_;
};

}  // namespace qpsense
