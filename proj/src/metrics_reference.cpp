#include <algorithm>
#include <map>
#include <set>

#include "pubdyn/error.hpp"
#include "pubdyn/metrics.hpp"

namespace pubdyn::reference {

namespace {

struct Tally {
  std::map<std::int64_t, std::uint64_t> counts;
  void add(std::int64_t support) { ++counts[support]; }
  SparseHistogram done() const {
    return SparseHistogram::from_bins({counts.begin(), counts.end()});
  }
};

template <typename Key, typename Value>
SparseHistogram histogram_of(const std::map<Key, Value>& per_entity) {
  Tally h;
  for (const auto& [key, value] : per_entity) h.add(static_cast<std::int64_t>(value));
  return h.done();
}

template <typename Key, typename Set>
SparseHistogram histogram_of_sizes(const std::map<Key, Set>& per_entity) {
  Tally h;
  for (const auto& [key, set] : per_entity) h.add(static_cast<std::int64_t>(set.size()));
  return h.done();
}

template <typename Records>
SparseHistogram intervals(const Records& records) {
  std::map<AccountId, std::vector<UnixSeconds>> times;
  for (const auto& r : records) times[r.author_id].push_back(r.created);
  Tally h;
  for (auto& [author, t] : times) {
    std::sort(t.begin(), t.end());
    for (std::size_t i = 1; i < t.size(); ++i) h.add(t[i] - t[i - 1]);
  }
  return h.done();
}

SparseHistogram population(const Corpus& corpus, MetricKind kind) {
  const auto& resolved = corpus.resolved();
  auto post_author = [&](MessageId post) { return corpus.find_post(post)->author_id; };

  switch (kind) {
    case MetricKind::posts_per_account: {
      std::map<AccountId, std::uint64_t> n;
      for (const auto& p : corpus.posts()) ++n[p.author_id];
      return histogram_of(n);
    }
    case MetricKind::post_interevent:
      return intervals(corpus.posts());
    case MetricKind::comments_per_account: {
      std::map<AccountId, std::uint64_t> n;
      for (const auto& c : corpus.comments()) ++n[c.author_id];
      return histogram_of(n);
    }
    case MetricKind::comment_interevent:
      return intervals(corpus.comments());
    case MetricKind::comments_per_commented_post: {
      std::map<MessageId, std::uint64_t> n;
      for (const auto& rc : resolved) ++n[rc.root_post_id];
      return histogram_of(n);
    }
    case MetricKind::self_comments_per_commented_post: {
      std::map<MessageId, std::uint64_t> n;
      for (const auto& rc : resolved) {
        n[rc.root_post_id] += rc.comment.author_id == post_author(rc.root_post_id) ? 1 : 0;
      }
      return histogram_of(n);
    }
    case MetricKind::commentators_per_commented_post: {
      std::map<MessageId, std::set<AccountId>> who;
      for (const auto& rc : resolved) who[rc.root_post_id].insert(rc.comment.author_id);
      return histogram_of_sizes(who);
    }
    case MetricKind::first_comment_delay: {
      std::map<MessageId, UnixSeconds> first;
      for (const auto& rc : resolved) {
        auto [it, inserted] = first.try_emplace(rc.root_post_id, rc.comment.created);
        if (!inserted) it->second = std::min(it->second, rc.comment.created);
      }
      Tally h;
      for (const auto& [post, t] : first) h.add(t - corpus.find_post(post)->created);
      return h.done();
    }
    case MetricKind::comments_received_per_post_author: {
      std::map<AccountId, std::uint64_t> n;
      for (const auto& rc : resolved) ++n[post_author(rc.root_post_id)];
      return histogram_of(n);
    }
    case MetricKind::commentators_per_post_author: {
      std::map<AccountId, std::set<AccountId>> who;
      for (const auto& rc : resolved) who[post_author(rc.root_post_id)].insert(rc.comment.author_id);
      return histogram_of_sizes(who);
    }
    case MetricKind::commented_posts_per_commentator: {
      std::map<AccountId, std::set<MessageId>> posts;
      for (const auto& rc : resolved) posts[rc.comment.author_id].insert(rc.root_post_id);
      return histogram_of_sizes(posts);
    }
    case MetricKind::post_authors_per_commentator: {
      std::map<AccountId, std::set<AccountId>> authors;
      for (const auto& rc : resolved) {
        authors[rc.comment.author_id].insert(post_author(rc.root_post_id));
      }
      return histogram_of_sizes(authors);
    }
    default:
      break;
  }
  throw DomainError("unknown metric kind " + std::to_string(static_cast<int>(kind)));
}

}  // namespace

DistributionResult compute_distribution(const Corpus& corpus, MetricKind kind) {
  if (auto base = population_of(kind)) {
    return make_result(kind, population(corpus, *base).mass_weighted());
  }
  return make_result(kind, population(corpus, kind));
}

}  // namespace pubdyn::reference
