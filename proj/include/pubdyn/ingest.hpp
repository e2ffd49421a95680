#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pubdyn/records.hpp"

namespace pubdyn::ingest {

/// Inclusive [start, end] range of accepted creation times.
struct TimeWindow {
  UnixSeconds start = 0;
  UnixSeconds end = 0;
  bool contains(UnixSeconds t) const { return t >= start && t <= end; }
};

/// Delimiter and header handling for the tabular inputs.
///
/// A header line is any line whose first field starts with '#'. Without
/// strict mode a header is optional and skipped; with strict mode it must be
/// present and name exactly the schema columns.
struct Format {
  char delimiter = '\t';
  bool strict = false;
  std::optional<TimeWindow> window;
  int threads = 0;  // 0: OpenMP default
};

/// Reason codes attached to quarantined rows.
namespace reason {
inline constexpr std::string_view kBadColumnCount = "bad_column_count";
inline constexpr std::string_view kBadMessageId = "bad_message_id";
inline constexpr std::string_view kBadAuthorId = "bad_author_id";
inline constexpr std::string_view kBadTimestamp = "bad_timestamp";
inline constexpr std::string_view kBadParentId = "bad_parent_id";
inline constexpr std::string_view kDuplicateId = "duplicate_id";
inline constexpr std::string_view kSelfParent = "self_parent";
inline constexpr std::string_view kOutsideWindow = "outside_window";
}  // namespace reason

struct QuarantinedRow {
  std::size_t line_number = 0;  // 1-based physical line
  std::string raw;
  std::string reason;

  friend bool operator==(const QuarantinedRow&, const QuarantinedRow&) = default;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::size_t rows_quarantined = 0;
  std::map<std::string, std::size_t> quarantine_reasons;
  std::vector<QuarantinedRow> quarantined;

  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  IngestReport report;
};

inline constexpr std::size_t kPostColumns = 4;
inline constexpr std::size_t kCommentColumns = 5;
std::vector<std::string_view> post_header();
std::vector<std::string_view> comment_header();

// Text overloads parse an in-memory table; stream and path overloads read it
// fully first. Unreadable sources raise IoError, strict header mismatches
// raise SchemaError. Everything else is quarantined per row.
ParseResult<PostRecord> parse_posts(std::string_view text, const Format& format = {});
ParseResult<PostRecord> parse_posts(std::istream& in, const Format& format = {});
ParseResult<PostRecord> parse_posts_file(const std::filesystem::path& path,
                                         const Format& format = {});

ParseResult<CommentRecord> parse_comments(std::string_view text, const Format& format = {});
ParseResult<CommentRecord> parse_comments(std::istream& in, const Format& format = {});
ParseResult<CommentRecord> parse_comments_file(const std::filesystem::path& path,
                                               const Format& format = {});

/// Sidecar layout: original row, then the reason code, joined by `delimiter`.
void write_quarantine(std::ostream& out, const IngestReport& report, char delimiter = '\t');

void write_posts(std::ostream& out, const std::vector<PostRecord>& posts, char delimiter = '\t');
void write_comments(std::ostream& out, const std::vector<CommentRecord>& comments,
                    char delimiter = '\t');

std::string read_all(const std::filesystem::path& path);

}  // namespace pubdyn::ingest
