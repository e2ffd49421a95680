#include "pubdyn/metrics.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_set>

#include "pubdyn/error.hpp"

namespace pubdyn {

namespace {
constexpr std::array<std::string_view, 16> kNames = {
    "posts_per_account",
    "post_share_by_performance",
    "post_interevent",
    "comments_per_account",
    "comment_mass_by_commenter_performance",
    "comments_per_commented_post",
    "comment_mass_by_post_aggregation",
    "self_comments_per_commented_post",
    "comments_received_per_post_author",
    "comment_mass_by_author_aggregation",
    "commentators_per_commented_post",
    "commentators_per_post_author",
    "commented_posts_per_commentator",
    "post_authors_per_commentator",
    "first_comment_delay",
    "comment_interevent",
};

std::size_t index_of(MetricKind kind) {
  const auto i = static_cast<std::size_t>(kind);
  if (i >= kNames.size()) throw DomainError("unknown metric kind " + std::to_string(i));
  return i;
}
}  // namespace

std::string_view to_string(MetricKind kind) { return kNames[index_of(kind)]; }

std::optional<MetricKind> metric_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<MetricKind>(i);
  }
  return std::nullopt;
}

SupportUnit support_unit(MetricKind kind) {
  switch (kind) {
    case MetricKind::post_interevent:
    case MetricKind::first_comment_delay:
    case MetricKind::comment_interevent:
      return SupportUnit::seconds;
    default:
      index_of(kind);
      return SupportUnit::count;
  }
}

MetricInputs metric_inputs(MetricKind kind) {
  switch (kind) {
    case MetricKind::posts_per_account:
    case MetricKind::post_share_by_performance:
    case MetricKind::post_interevent:
      return MetricInputs::posts;
    case MetricKind::comments_per_account:
    case MetricKind::comment_mass_by_commenter_performance:
    case MetricKind::comment_interevent:
      return MetricInputs::comments;
    default:
      index_of(kind);
      return MetricInputs::posts_and_comments;
  }
}

std::optional<MetricKind> population_of(MetricKind kind) {
  switch (kind) {
    case MetricKind::post_share_by_performance: return MetricKind::posts_per_account;
    case MetricKind::comment_mass_by_commenter_performance: return MetricKind::comments_per_account;
    case MetricKind::comment_mass_by_post_aggregation: return MetricKind::comments_per_commented_post;
    case MetricKind::comment_mass_by_author_aggregation:
      return MetricKind::comments_received_per_post_author;
    default:
      index_of(kind);
      return std::nullopt;
  }
}

bool is_mass_metric(MetricKind kind) { return population_of(kind).has_value(); }

DistributionResult make_result(MetricKind kind, SparseHistogram histogram) {
  DistributionResult r;
  r.kind = kind;
  r.cumulative = cumulative(histogram);
  r.median_by_population = median_by_population(histogram);
  if (support_unit(kind) == SupportUnit::count && !is_mass_metric(kind)) {
    r.median_by_mass = median_by_mass(histogram);
  }
  r.max_support = histogram.max_support();
  r.min_support = histogram.min_support();
  r.zero_count = histogram.count_at(0);
  for (const auto& [support, count] : histogram.bins()) {
    if (support >= 0) break;
    r.negative_count += count;
  }
  r.histogram = std::move(histogram);
  return r;
}

namespace {
std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> span_days(std::optional<UnixSeconds> first, std::optional<UnixSeconds> last) {
  if (!first || !last) return std::nullopt;
  return static_cast<double>(*last - *first) / 86400.0;
}
}  // namespace

SummaryStats summarize(const SummaryCounts& counts, std::optional<std::uint64_t> resolved_comments) {
  SummaryStats s;
  s.first_time = counts.first_time;
  s.last_time = counts.last_time;
  s.span_days = span_days(counts.first_time, counts.last_time);
  s.first_comment_time = counts.first_comment_time;
  s.last_comment_time = counts.last_comment_time;
  s.comment_span_days = span_days(counts.first_comment_time, counts.last_comment_time);
  s.n_posts = counts.n_posts;
  s.n_post_accounts = counts.n_post_accounts;
  s.n_comments = counts.n_comments;
  s.n_commenters = counts.n_commenters;
  s.n_commented_posts = counts.n_commented_posts;
  s.n_commented_post_authors = counts.n_commented_post_authors;
  s.n_resolved_comments = resolved_comments.value_or(counts.n_comments);
  s.n_unresolved_comments = counts.n_comments - std::min(counts.n_comments, s.n_resolved_comments);

  s.mean_post_performance = ratio(s.n_posts, s.n_post_accounts);
  s.mean_comment_performance = ratio(s.n_comments, s.n_commenters);
  s.mean_comments_per_commented_post = ratio(s.n_resolved_comments, s.n_commented_posts);
  s.mean_comments_per_commented_author = ratio(s.n_resolved_comments, s.n_commented_post_authors);
  return s;
}

SummaryStats compute_summary(const Corpus& corpus) {
  SummaryCounts c;
  c.n_posts = corpus.posts().size();
  c.n_post_accounts = corpus.posts_by_author_index().size();
  c.n_comments = corpus.comments().size();
  c.n_commenters = corpus.comments_by_author_index().size();
  c.n_commented_posts = corpus.resolved_by_post_index().size();

  std::unordered_set<AccountId> authors;
  for (MessageId post : corpus.resolved_by_post_index().keys) {
    authors.insert(corpus.find_post(post)->author_id);
  }
  c.n_commented_post_authors = authors.size();

  for (const auto& p : corpus.posts()) {
    c.first_time = std::min(c.first_time.value_or(p.created), p.created);
    c.last_time = std::max(c.last_time.value_or(p.created), p.created);
  }
  for (const auto& m : corpus.comments()) {
    c.first_comment_time = std::min(c.first_comment_time.value_or(m.created), m.created);
    c.last_comment_time = std::max(c.last_comment_time.value_or(m.created), m.created);
  }
  return summarize(c, corpus.resolved().size());
}

DistributionResult negative_subset(const DistributionResult& delays) {
  const auto& h = delays.histogram;
  const auto lowest = std::numeric_limits<std::int64_t>::min();
  return make_result(delays.kind, h.restricted(lowest, -1));
}

DistributionResult negative_delay_stats(const Corpus& corpus, int threads) {
  return negative_subset(compute_distribution(corpus, MetricKind::first_comment_delay, threads));
}

}  // namespace pubdyn
