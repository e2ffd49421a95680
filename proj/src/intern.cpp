#include "pubdyn/intern.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "pubdyn/error.hpp"

namespace pubdyn {

std::uint64_t InternTable::intern(std::string_view url) {
  if (url.empty()) throw DomainError("cannot intern an empty url");
  if (auto it = by_url_.find(std::string(url)); it != by_url_.end()) return it->second;
  const std::uint64_t id = next_id_;
  insert(id, std::string(url));
  return id;
}

std::optional<std::uint64_t> InternTable::find(std::string_view url) const {
  if (auto it = by_url_.find(std::string(url)); it != by_url_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string_view> InternTable::url_of(std::uint64_t id) const {
  if (auto it = by_id_.find(id); it != by_id_.end()) return entries_[it->second].url;
  return std::nullopt;
}

void InternTable::insert(std::uint64_t id, std::string url) {
  by_url_.emplace(url, id);
  by_id_.emplace(id, entries_.size());
  entries_.push_back({id, std::move(url)});
  next_id_ = std::max(next_id_, id + 1);
}

void InternTable::write(std::ostream& out, char delimiter) const {
  out << '#' << delimiter << "id" << delimiter << "url" << '\n';
  std::size_t row = 0;
  for (const auto& e : entries_) out << ++row << delimiter << e.id << delimiter << e.url << '\n';
}

InternTable InternTable::read(std::istream& in, char delimiter) {
  InternTable table;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto d1 = line.find(delimiter);
    const auto d2 = d1 == std::string::npos ? d1 : line.find(delimiter, d1 + 1);
    if (d2 == std::string::npos) {
      throw SchemaError("reference table line " + std::to_string(line_number) +
                        ": expected row#, id, url");
    }
    std::uint64_t id = 0;
    const char* first = line.data() + d1 + 1;
    const char* last = line.data() + d2;
    auto [ptr, ec] = std::from_chars(first, last, id);
    std::string url = line.substr(d2 + 1);
    if (ec != std::errc() || ptr != last || url.empty()) {
      throw SchemaError("reference table line " + std::to_string(line_number) + ": bad id or url");
    }
    if (table.by_id_.count(id) || table.by_url_.count(url)) {
      throw SchemaError("reference table line " + std::to_string(line_number) +
                        ": id/url pair breaks the one-to-one mapping");
    }
    table.insert(id, std::move(url));
  }
  if (in.bad()) throw IoError("read failure on reference table");
  return table;
}

InternTable InternTable::read_file(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read(in, delimiter);
}

}  // namespace pubdyn
