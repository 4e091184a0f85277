#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace roughmerton {

/// Sectioned key-value configuration:
///
///   [market]
///   theta = 1.0
///
/// Keys are addressed as "section.key". Every getter parses strictly and
/// throws DomainError on malformed values.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  /// Applies one "section.key=value" override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws DomainError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
  nlohmann::json to_json() const;

 private:
  std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
std::vector<double> parse_doubles(const std::string& text, const std::string& what);

}  // namespace roughmerton
