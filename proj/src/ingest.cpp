#include "pubdyn/ingest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <variant>

#include <omp.h>

#include "pubdyn/error.hpp"

namespace pubdyn::ingest {

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back({number, line});
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(delimiter, pos);
    if (end == std::string_view::npos) {
      fields.push_back(trim(line.substr(pos)));
      break;
    }
    fields.push_back(trim(line.substr(pos, end - pos)));
    pos = end + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_header(std::string_view line, char delimiter) {
  auto fields = split_fields(line, delimiter);
  return !fields.empty() && !fields.front().empty() && fields.front().front() == '#';
}

void check_header(std::string_view line, char delimiter,
                  const std::vector<std::string_view>& expected) {
  auto fields = split_fields(line, delimiter);
  if (fields != expected) {
    throw SchemaError("header mismatch: expected " + std::to_string(expected.size()) +
                      " columns named as in the table schema, got '" + std::string(line) + "'");
  }
}

using RowOutcome = std::variant<PostRecord, CommentRecord, std::string_view>;

RowOutcome parse_post_row(std::string_view line, const Format& format) {
  auto f = split_fields(line, format.delimiter);
  if (f.size() != kPostColumns) return reason::kBadColumnCount;
  PostRecord r;
  if (!parse_number(f[1], r.message_id)) return reason::kBadMessageId;
  if (!parse_number(f[2], r.author_id)) return reason::kBadAuthorId;
  if (!parse_number(f[3], r.created)) return reason::kBadTimestamp;
  if (format.window && !format.window->contains(r.created)) return reason::kOutsideWindow;
  return r;
}

RowOutcome parse_comment_row(std::string_view line, const Format& format) {
  auto f = split_fields(line, format.delimiter);
  if (f.size() != kCommentColumns) return reason::kBadColumnCount;
  CommentRecord r;
  if (!parse_number(f[1], r.message_id)) return reason::kBadMessageId;
  if (!parse_number(f[2], r.author_id)) return reason::kBadAuthorId;
  if (!parse_number(f[3], r.created)) return reason::kBadTimestamp;
  if (!parse_number(f[4], r.parent_id)) return reason::kBadParentId;
  if (r.message_id == r.parent_id) return reason::kSelfParent;
  if (format.window && !format.window->contains(r.created)) return reason::kOutsideWindow;
  return r;
}

void quarantine(IngestReport& report, const Line& line, std::string_view why) {
  report.quarantined.push_back({line.number, std::string(line.text), std::string(why)});
  ++report.quarantine_reasons[std::string(why)];
  ++report.rows_quarantined;
}

template <typename Record, typename RowParser>
ParseResult<Record> parse_table(std::string_view text, const Format& format,
                                const std::vector<std::string_view>& header,
                                RowParser parse_row) {
  std::vector<Line> lines = split_lines(text);

  std::size_t first = 0;
  if (!lines.empty() && is_header(lines.front().text, format.delimiter)) {
    if (format.strict) check_header(lines.front().text, format.delimiter, header);
    first = 1;
  } else if (format.strict) {
    throw SchemaError("missing header line");
  }

  const std::size_t n = lines.size() - first;
  std::vector<RowOutcome> outcomes(n, std::string_view{});
  const int threads = format.threads > 0 ? format.threads : omp_get_max_threads();

#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    outcomes[i] = parse_row(lines[first + i].text, format);
  }

  ParseResult<Record> result;
  result.records.reserve(n);
  std::unordered_set<MessageId> seen;
  seen.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Line& line = lines[first + i];
    ++result.report.rows_read;
    if (auto* why = std::get_if<std::string_view>(&outcomes[i])) {
      quarantine(result.report, line, *why);
      continue;
    }
    const Record& rec = std::get<Record>(outcomes[i]);
    if (!seen.insert(rec.message_id).second) {
      quarantine(result.report, line, reason::kDuplicateId);
      continue;
    }
    result.records.push_back(rec);
    ++result.report.rows_accepted;
  }
  return result;
}

}  // namespace

std::vector<std::string_view> post_header() {
  return {"#", "message_id", "author_id", "created"};
}

std::vector<std::string_view> comment_header() {
  return {"#", "message_id", "author_id", "created", "parent_id"};
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return std::move(buf).str();
}

namespace {
std::string slurp(std::istream& in) {
  if (!in) throw IoError("unreadable input stream");
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failure on input stream");
  return text;
}
}  // namespace

ParseResult<PostRecord> parse_posts(std::string_view text, const Format& format) {
  return parse_table<PostRecord>(text, format, post_header(), parse_post_row);
}

ParseResult<PostRecord> parse_posts(std::istream& in, const Format& format) {
  const std::string text = slurp(in);
  return parse_posts(std::string_view(text), format);
}

ParseResult<PostRecord> parse_posts_file(const std::filesystem::path& path, const Format& format) {
  const std::string text = read_all(path);
  return parse_posts(std::string_view(text), format);
}

ParseResult<CommentRecord> parse_comments(std::string_view text, const Format& format) {
  return parse_table<CommentRecord>(text, format, comment_header(), parse_comment_row);
}

ParseResult<CommentRecord> parse_comments(std::istream& in, const Format& format) {
  const std::string text = slurp(in);
  return parse_comments(std::string_view(text), format);
}

ParseResult<CommentRecord> parse_comments_file(const std::filesystem::path& path,
                                               const Format& format) {
  const std::string text = read_all(path);
  return parse_comments(std::string_view(text), format);
}

void write_quarantine(std::ostream& out, const IngestReport& report, char delimiter) {
  for (const auto& row : report.quarantined) out << row.raw << delimiter << row.reason << '\n';
}

namespace {
void write_header(std::ostream& out, const std::vector<std::string_view>& names, char delimiter) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out << delimiter;
    out << names[i];
  }
  out << '\n';
}
}  // namespace

void write_posts(std::ostream& out, const std::vector<PostRecord>& posts, char delimiter) {
  write_header(out, post_header(), delimiter);
  std::size_t row = 0;
  for (const auto& p : posts) {
    out << ++row << delimiter << p.message_id << delimiter << p.author_id << delimiter
        << p.created << '\n';
  }
}

void write_comments(std::ostream& out, const std::vector<CommentRecord>& comments,
                    char delimiter) {
  write_header(out, comment_header(), delimiter);
  std::size_t row = 0;
  for (const auto& c : comments) {
    out << ++row << delimiter << c.message_id << delimiter << c.author_id << delimiter
        << c.created << delimiter << c.parent_id << '\n';
  }
}

}  // namespace pubdyn::ingest
