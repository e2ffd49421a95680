#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pubdyn/corpus.hpp"
#include "pubdyn/histogram.hpp"

namespace pubdyn {

enum class MetricKind : std::uint8_t {
  posts_per_account,
  post_share_by_performance,
  post_interevent,
  comments_per_account,
  comment_mass_by_commenter_performance,
  comments_per_commented_post,
  comment_mass_by_post_aggregation,
  self_comments_per_commented_post,
  comments_received_per_post_author,
  comment_mass_by_author_aggregation,
  commentators_per_commented_post,
  commentators_per_post_author,
  commented_posts_per_commentator,
  post_authors_per_commentator,
  first_comment_delay,
  comment_interevent,
};

inline constexpr std::array<MetricKind, 16> kAllMetrics = {
    MetricKind::posts_per_account,
    MetricKind::post_share_by_performance,
    MetricKind::post_interevent,
    MetricKind::comments_per_account,
    MetricKind::comment_mass_by_commenter_performance,
    MetricKind::comments_per_commented_post,
    MetricKind::comment_mass_by_post_aggregation,
    MetricKind::self_comments_per_commented_post,
    MetricKind::comments_received_per_post_author,
    MetricKind::comment_mass_by_author_aggregation,
    MetricKind::commentators_per_commented_post,
    MetricKind::commentators_per_post_author,
    MetricKind::commented_posts_per_commentator,
    MetricKind::post_authors_per_commentator,
    MetricKind::first_comment_delay,
    MetricKind::comment_interevent,
};

enum class SupportUnit : std::uint8_t { count, seconds };

/// Which input tables a metric needs.
enum class MetricInputs : std::uint8_t { posts, comments, posts_and_comments };

std::string_view to_string(MetricKind kind);
std::optional<MetricKind> metric_from_string(std::string_view name);
SupportUnit support_unit(MetricKind kind);
MetricInputs metric_inputs(MetricKind kind);
/// Mass metrics weight each bin of their population metric by its support.
bool is_mass_metric(MetricKind kind);
/// The population metric a mass metric is derived from.
std::optional<MetricKind> population_of(MetricKind kind);

struct DistributionResult {
  MetricKind kind = MetricKind::posts_per_account;
  SparseHistogram histogram;
  CumulativeCurve cumulative;
  std::optional<std::int64_t> median_by_population;
  std::optional<std::int64_t> median_by_mass;  // count-support population metrics only
  std::optional<std::int64_t> max_support;
  std::optional<std::int64_t> min_support;
  std::uint64_t zero_count = 0;
  std::uint64_t negative_count = 0;

  friend bool operator==(const DistributionResult&, const DistributionResult&) = default;
};

/// Fills every derived field of a DistributionResult from its histogram.
DistributionResult make_result(MetricKind kind, SparseHistogram histogram);

struct SummaryCounts {
  std::uint64_t n_posts = 0;
  std::uint64_t n_post_accounts = 0;
  std::uint64_t n_comments = 0;
  std::uint64_t n_commenters = 0;
  std::uint64_t n_commented_posts = 0;
  std::uint64_t n_commented_post_authors = 0;
  std::optional<UnixSeconds> first_time;
  std::optional<UnixSeconds> last_time;
  std::optional<UnixSeconds> first_comment_time;
  std::optional<UnixSeconds> last_comment_time;
};

struct SummaryStats {
  std::optional<UnixSeconds> first_time;
  std::optional<UnixSeconds> last_time;
  std::optional<double> span_days;
  std::optional<UnixSeconds> first_comment_time;
  std::optional<UnixSeconds> last_comment_time;
  std::optional<double> comment_span_days;
  std::uint64_t n_posts = 0;
  std::uint64_t n_post_accounts = 0;
  std::uint64_t n_comments = 0;
  std::uint64_t n_commenters = 0;
  std::uint64_t n_commented_posts = 0;
  std::uint64_t n_commented_post_authors = 0;
  std::uint64_t n_unresolved_comments = 0;
  // Absent when the denominator is zero.
  std::optional<double> mean_post_performance;             // n_posts / n_post_accounts
  std::optional<double> mean_comment_performance;          // n_comments / n_commenters
  std::optional<double> mean_comments_per_commented_post;  // resolved / n_commented_posts
  std::optional<double> mean_comments_per_commented_author;  // resolved / n_commented_post_authors
  std::uint64_t n_resolved_comments = 0;
};

/// Means from literal counts. `resolved_comments` defaults to n_comments.
SummaryStats summarize(const SummaryCounts& counts,
                       std::optional<std::uint64_t> resolved_comments = std::nullopt);
SummaryStats compute_summary(const Corpus& corpus);

/// OpenMP kernels. Results are bit-identical for every thread count.
DistributionResult compute_distribution(const Corpus& corpus, MetricKind kind, int threads = 0);
std::vector<DistributionResult> compute_distributions(const Corpus& corpus,
                                                      const std::vector<MetricKind>& kinds,
                                                      int threads = 0);

/// first_comment_delay restricted to negative delays.
DistributionResult negative_delay_stats(const Corpus& corpus, int threads = 0);
DistributionResult negative_subset(const DistributionResult& delays);

namespace reference {
/// Straightforward single-threaded implementation used as a cross-check for
/// the parallel kernels.
DistributionResult compute_distribution(const Corpus& corpus, MetricKind kind);
}  // namespace reference

}  // namespace pubdyn
