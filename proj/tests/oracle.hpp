#pragma once

// Brute-force recomputation of every distribution straight from raw records,
// sharing no code with the library beyond the record types.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pubdyn/metrics.hpp"
#include "pubdyn/records.hpp"

namespace oracle {

struct Result {
  std::vector<std::pair<std::int64_t, std::uint64_t>> bins;
  std::vector<double> cumulative;
  std::optional<std::int64_t> median_by_population;
  std::optional<std::int64_t> median_by_mass;
  std::optional<std::int64_t> max_support;
  std::optional<std::int64_t> min_support;
  std::uint64_t zero_count = 0;
  std::uint64_t negative_count = 0;
};

struct Resolved {
  pubdyn::CommentRecord comment;
  pubdyn::MessageId root = 0;
};

/// Walks parent links with linear-time lookups; fails on orphans, cycles and
/// chains longer than max_depth.
std::vector<Resolved> resolve_all(const std::vector<pubdyn::PostRecord>& posts,
                                  const std::vector<pubdyn::CommentRecord>& comments,
                                  std::uint32_t max_depth = 64);

Result compute(const std::vector<pubdyn::PostRecord>& posts,
               const std::vector<pubdyn::CommentRecord>& comments, pubdyn::MetricKind kind);

struct Records {
  std::vector<pubdyn::PostRecord> posts;
  std::vector<pubdyn::CommentRecord> comments;
};

/// Small adversarial corpus: coarse timestamps so ties occur, replies to
/// comments, orphans, cycles, self-comments and early comments.
Records random_records(std::uint64_t seed, std::size_t n_posts, std::size_t n_comments);

/// Field-by-field equality with the library's result, doubles compared bitwise.
bool same(const Result& expected, const pubdyn::DistributionResult& actual);

}  // namespace oracle
