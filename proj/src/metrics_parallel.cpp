#include <algorithm>
#include <optional>
#include <tuple>

#include <omp.h>

#include "pubdyn/error.hpp"
#include "pubdyn/metrics.hpp"

namespace pubdyn {

namespace {

using Values = std::vector<std::int64_t>;

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

/// Each thread sorts and run-length encodes one contiguous chunk; the sorted
/// chunk histograms are merged afterwards, so the result does not depend on
/// the thread count.
SparseHistogram parallel_histogram(Values values, int threads) {
  const std::size_t n = values.size();
  const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(threads, n / 4096 + 1));
  std::vector<SparseHistogram> partial(parts);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(parts); ++p) {
    const std::size_t lo = n * p / parts;
    const std::size_t hi = n * (p + 1) / parts;
    partial[p] = SparseHistogram::from_values(Values(values.begin() + lo, values.begin() + hi));
  }
  return parts == 1 ? std::move(partial.front()) : merge(partial);
}

Values group_sizes(const GroupIndex& index, int threads) {
  Values out(index.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t g = 0; g < static_cast<std::ptrdiff_t>(index.size()); ++g) {
    out[g] = static_cast<std::int64_t>(index.offsets[g + 1] - index.offsets[g]);
  }
  return out;
}

/// Consecutive differences of the (already time-sorted) records of each group,
/// pooled. Group g writes its k-1 differences at a precomputed offset.
template <typename Records>
Values pooled_intervals(const Records& records, const GroupIndex& index, int threads) {
  std::vector<std::size_t> at(index.size() + 1, 0);
  for (std::size_t g = 0; g < index.size(); ++g) {
    at[g + 1] = at[g] + (index.offsets[g + 1] - index.offsets[g] - 1);
  }
  Values out(at.back());
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (std::ptrdiff_t g = 0; g < static_cast<std::ptrdiff_t>(index.size()); ++g) {
    std::size_t w = at[g];
    for (std::size_t i = index.offsets[g] + 1; i < index.offsets[g + 1]; ++i) {
      out[w++] = records[i].created - records[i - 1].created;
    }
  }
  return out;
}

std::int64_t distinct_count(std::vector<std::uint64_t>& ids) {
  std::sort(ids.begin(), ids.end());
  return std::unique(ids.begin(), ids.end()) - ids.begin();
}

/// Per-entity tables shared by the post/comment cross metrics; each is built
/// at most once per Kernels instance.
class Kernels {
 public:
  Kernels(const Corpus& corpus, int threads) : corpus_(corpus), threads_(thread_count(threads)) {}

  DistributionResult run(MetricKind kind) {
    if (auto base = population_of(kind)) {
      return make_result(kind, population(*base).mass_weighted());
    }
    return make_result(kind, population(kind));
  }

 private:
  struct PostTable {
    Values comments, self_comments, commentators, first_delay;
    std::vector<AccountId> author;
  };
  struct AuthorTable {
    Values received, commentators;
  };
  struct CommentatorTable {
    Values posts, authors;
  };

  SparseHistogram population(MetricKind kind) {
    switch (kind) {
      case MetricKind::posts_per_account:
        return hist(group_sizes(corpus_.posts_by_author_index(), threads_));
      case MetricKind::post_interevent:
        return hist(pooled_intervals(corpus_.posts(), corpus_.posts_by_author_index(), threads_));
      case MetricKind::comments_per_account:
        return hist(group_sizes(corpus_.comments_by_author_index(), threads_));
      case MetricKind::comment_interevent:
        return hist(
            pooled_intervals(corpus_.comments(), corpus_.comments_by_author_index(), threads_));
      case MetricKind::comments_per_commented_post: return hist(post_table().comments);
      case MetricKind::self_comments_per_commented_post: return hist(post_table().self_comments);
      case MetricKind::commentators_per_commented_post: return hist(post_table().commentators);
      case MetricKind::first_comment_delay: return hist(post_table().first_delay);
      case MetricKind::comments_received_per_post_author: return hist(author_table().received);
      case MetricKind::commentators_per_post_author: return hist(author_table().commentators);
      case MetricKind::commented_posts_per_commentator: return hist(commentator_table().posts);
      case MetricKind::post_authors_per_commentator: return hist(commentator_table().authors);
      default: break;
    }
    throw DomainError("unknown metric kind " + std::to_string(static_cast<int>(kind)));
  }

  SparseHistogram hist(const Values& v) const { return parallel_histogram(v, threads_); }

  const PostTable& post_table() {
    if (posts_) return *posts_;
    const GroupIndex& index = corpus_.resolved_by_post_index();
    const auto& resolved = corpus_.resolved();
    const std::size_t n = index.size();
    PostTable t;
    t.comments.resize(n);
    t.self_comments.resize(n);
    t.commentators.resize(n);
    t.first_delay.resize(n);
    t.author.resize(n);
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads_)
    for (std::ptrdiff_t g = 0; g < static_cast<std::ptrdiff_t>(n); ++g) {
      const PostRecord& post = *corpus_.find_post(index.keys[g]);
      const std::size_t lo = index.offsets[g];
      const std::size_t hi = index.offsets[g + 1];
      std::vector<std::uint64_t> who;
      who.reserve(hi - lo);
      std::int64_t self = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        who.push_back(resolved[i].comment.author_id);
        self += resolved[i].comment.author_id == post.author_id;
      }
      t.author[g] = post.author_id;
      t.comments[g] = static_cast<std::int64_t>(hi - lo);
      t.self_comments[g] = self;
      t.commentators[g] = distinct_count(who);
      // Group members are ordered by creation time: the first one is the earliest.
      t.first_delay[g] = resolved[lo].comment.created - post.created;
    }
    posts_ = std::move(t);
    return *posts_;
  }

  const AuthorTable& author_table() {
    if (authors_) return *authors_;
    const PostTable& pt = post_table();
    const GroupIndex& index = corpus_.resolved_by_post_index();
    const auto& resolved = corpus_.resolved();

    // Commented posts ordered by author, then grouped.
    std::vector<std::size_t> order(pt.author.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return pt.author[x] < pt.author[y]; });
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i == 0 || pt.author[order[i]] != pt.author[order[i - 1]]) starts.push_back(i);
    }
    starts.push_back(order.size());

    const std::size_t n = starts.size() - 1;
    AuthorTable t;
    t.received.resize(n);
    t.commentators.resize(n);
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads_)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(n); ++a) {
      std::int64_t received = 0;
      std::vector<std::uint64_t> who;
      for (std::size_t k = starts[a]; k < starts[a + 1]; ++k) {
        const std::size_t g = order[k];
        received += pt.comments[g];
        for (std::size_t i = index.offsets[g]; i < index.offsets[g + 1]; ++i) {
          who.push_back(resolved[i].comment.author_id);
        }
      }
      t.received[a] = received;
      t.commentators[a] = distinct_count(who);
    }
    authors_ = std::move(t);
    return *authors_;
  }

  const CommentatorTable& commentator_table() {
    if (commentators_) return *commentators_;
    const auto& resolved = corpus_.resolved();
    const std::size_t m = resolved.size();

    // (commentator, root post, post author) for every resolved comment.
    std::vector<std::tuple<AccountId, MessageId, AccountId>> links(m);
#pragma omp parallel for schedule(static) num_threads(threads_)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
      const auto& rc = resolved[i];
      links[i] = {rc.comment.author_id, rc.root_post_id, corpus_.find_post(rc.root_post_id)->author_id};
    }
    std::sort(links.begin(), links.end());
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == 0 || std::get<0>(links[i]) != std::get<0>(links[i - 1])) starts.push_back(i);
    }
    starts.push_back(m);

    const std::size_t n = starts.size() - 1;
    CommentatorTable t;
    t.posts.resize(n);
    t.authors.resize(n);
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads_)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n); ++c) {
      std::int64_t posts = 0;
      std::vector<std::uint64_t> authors;
      for (std::size_t i = starts[c]; i < starts[c + 1]; ++i) {
        // links are sorted, so equal root posts of one commentator are adjacent
        if (i == starts[c] || std::get<1>(links[i]) != std::get<1>(links[i - 1])) ++posts;
        authors.push_back(std::get<2>(links[i]));
      }
      t.posts[c] = posts;
      t.authors[c] = distinct_count(authors);
    }
    commentators_ = std::move(t);
    return *commentators_;
  }

  const Corpus& corpus_;
  int threads_;
  std::optional<PostTable> posts_;
  std::optional<AuthorTable> authors_;
  std::optional<CommentatorTable> commentators_;
};

}  // namespace

DistributionResult compute_distribution(const Corpus& corpus, MetricKind kind, int threads) {
  return Kernels(corpus, threads).run(kind);
}

std::vector<DistributionResult> compute_distributions(const Corpus& corpus,
                                                      const std::vector<MetricKind>& kinds,
                                                      int threads) {
  Kernels kernels(corpus, threads);
  std::vector<DistributionResult> out;
  out.reserve(kinds.size());
  for (MetricKind k : kinds) out.push_back(kernels.run(k));
  return out;
}

}  // namespace pubdyn
