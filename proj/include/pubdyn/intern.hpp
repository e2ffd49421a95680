#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pubdyn {

struct RefEntry {
  std::uint64_t id = 0;
  std::string url;

  friend bool operator==(const RefEntry&, const RefEntry&) = default;
};

/// Bijective url <-> id table. Freshly interned ids are dense, starting at 1
/// in first-seen order. Not synchronized: build it from one thread, then
/// share it read-only.
class InternTable {
 public:
  /// Returns the existing id for `url`, or assigns the next one.
  /// Throws DomainError on an empty url.
  std::uint64_t intern(std::string_view url);

  std::optional<std::uint64_t> find(std::string_view url) const;
  std::optional<std::string_view> url_of(std::uint64_t id) const;
  std::size_t size() const { return entries_.size(); }

  /// Entries in insertion order.
  const std::vector<RefEntry>& entries() const { return entries_; }

  /// Reference-table layout: row#, id, url.
  void write(std::ostream& out, char delimiter = '\t') const;
  /// Throws SchemaError on malformed rows or if ids/urls are not one-to-one.
  static InternTable read(std::istream& in, char delimiter = '\t');
  static InternTable read_file(const std::filesystem::path& path, char delimiter = '\t');

 private:
  void insert(std::uint64_t id, std::string url);

  std::vector<RefEntry> entries_;
  std::unordered_map<std::string, std::uint64_t> by_url_;
  std::unordered_map<std::uint64_t, std::size_t> by_id_;
  std::uint64_t next_id_ = 1;
};

}  // namespace pubdyn
