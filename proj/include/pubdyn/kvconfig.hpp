#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace pubdyn {

/// Flat `key = value` configuration. Blank lines and lines starting with '#'
/// are ignored; later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig read_file(const std::filesystem::path& path);

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  bool has(std::string_view key) const { return values_.count(std::string(key)) > 0; }
  std::optional<std::string> get(std::string_view key) const;

  // Typed getters throw ConfigError when the value does not parse.
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<std::uint64_t> get_uint(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  /// "LO:HI" with LO <= HI.
  std::optional<std::pair<std::int64_t, std::int64_t>> get_range(std::string_view key) const;

  /// Throws ConfigError naming the first key outside `known`.
  void require_known(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text);

}  // namespace pubdyn
