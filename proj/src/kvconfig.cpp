#include "pubdyn/kvconfig.hpp"

#include <charconv>
#include <cstdlib>

#include "pubdyn/error.hpp"
#include "pubdyn/ingest.hpp"

namespace pubdyn {

namespace {

std::string_view strip(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + std::string(key) + "': not an integer: '" +
                      std::string(text) + "'");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_number;
    const std::string_view line = strip(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    const auto key = strip(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_number) + ": empty key");
    cfg.set(std::string(key), std::string(strip(line.substr(eq + 1))));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::read_file(const std::filesystem::path& path) {
  return parse(ingest::read_all(path));
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  char* end = nullptr;
  const double d = std::strtod(v->c_str(), &end);
  if (v->empty() || end != v->c_str() + v->size()) {
    throw ConfigError("config key '" + std::string(key) + "': not a number: '" + *v + "'");
  }
  return d;
}

std::optional<std::int64_t> KeyValueConfig::get_int(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_integer<std::int64_t>(key, *v);
}

std::optional<std::uint64_t> KeyValueConfig::get_uint(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_integer<std::uint64_t>(key, *v);
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': not a boolean: '" + *v + "'");
}

std::pair<std::int64_t, std::int64_t> parse_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("range must look like LO:HI, got '" + std::string(text) + "'");
  }
  const auto lo = parse_integer<std::int64_t>("range", strip(text.substr(0, colon)));
  const auto hi = parse_integer<std::int64_t>("range", strip(text.substr(colon + 1)));
  if (lo > hi) throw ConfigError("range '" + std::string(text) + "' has LO > HI");
  return {lo, hi};
}

std::optional<std::pair<std::int64_t, std::int64_t>> KeyValueConfig::get_range(
    std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_range(*v);
}

void KeyValueConfig::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace pubdyn
