#include "pubdyn/corpus.hpp"

#include <algorithm>
#include <tuple>

#include <omp.h>

#include "pubdyn/error.hpp"

namespace pubdyn {

std::string_view to_string(ContainerKind kind) {
  switch (kind) {
    case ContainerKind::Environment: return "environment";
    case ContainerKind::Platform: return "platform";
    case ContainerKind::Account: return "account";
    case ContainerKind::Message: return "message";
    case ContainerKind::Block: return "block";
  }
  return "unknown";
}

std::string_view to_string(ResolveFailure failure) {
  switch (failure) {
    case ResolveFailure::orphan: return "orphan";
    case ResolveFailure::cycle: return "cycle";
    case ResolveFailure::depth_exceeded: return "depth_exceeded";
  }
  return "unknown";
}

std::size_t ContainerTree::add(ContainerKind kind, std::uint64_t id,
                               std::optional<std::size_t> parent) {
  if (kind == ContainerKind::Environment) {
    if (parent) throw DomainError("environment containers have no parent");
  } else {
    if (!parent || *parent >= nodes_.size()) {
      throw DomainError(std::string(to_string(kind)) + " container requires a parent");
    }
    const auto expected = static_cast<int>(kind) - 1;
    if (static_cast<int>(nodes_[*parent].kind) != expected) {
      throw DomainError(std::string(to_string(kind)) + " cannot be placed under " +
                        std::string(to_string(nodes_[*parent].kind)));
    }
  }
  ContainerNode node;
  node.kind = kind;
  node.id = id;
  node.parent = parent;
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

std::size_t ContainerTree::count(ContainerKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.kind == kind; }));
}

std::optional<std::size_t> GroupIndex::find(std::uint64_t key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

namespace {

template <typename Records, typename KeyFn>
GroupIndex group_sorted(const Records& records, KeyFn key) {
  GroupIndex index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::uint64_t k = key(records[i]);
    if (index.keys.empty() || index.keys.back() != k) {
      if (!index.keys.empty()) index.offsets.push_back(i);
      index.keys.push_back(k);
    }
  }
  if (!index.keys.empty()) index.offsets.push_back(records.size());
  return index;
}

std::variant<ResolvedComment, ResolveFailure> resolve(const CommentRecord& comment,
                                                      const Corpus& corpus) {
  std::vector<MessageId> visited{comment.message_id};
  MessageId parent = comment.parent_id;
  std::uint32_t depth = 1;
  while (true) {
    if (corpus.find_post(parent)) return ResolvedComment{comment, parent, depth};
    const CommentRecord* next = corpus.find_comment(parent);
    if (!next) return ResolveFailure::orphan;
    if (std::find(visited.begin(), visited.end(), parent) != visited.end()) {
      return ResolveFailure::cycle;
    }
    if (depth >= corpus.max_depth()) return ResolveFailure::depth_exceeded;
    visited.push_back(parent);
    parent = next->parent_id;
    ++depth;
  }
}

template <typename Span, typename Vec>
Span group_span(const Vec& records, const GroupIndex& index, std::uint64_t key) {
  auto g = index.find(key);
  if (!g) return {};
  return Span(records.data() + index.offsets[*g], index.offsets[*g + 1] - index.offsets[*g]);
}

}  // namespace

Corpus build_corpus(std::vector<PostRecord> posts, std::vector<CommentRecord> comments,
                    const CorpusOptions& options) {
  Corpus corpus;
  corpus.max_depth_ = options.max_depth;

  std::sort(posts.begin(), posts.end(), [](const PostRecord& x, const PostRecord& y) {
    return std::tie(x.author_id, x.created, x.message_id) <
           std::tie(y.author_id, y.created, y.message_id);
  });
  std::sort(comments.begin(), comments.end(), [](const CommentRecord& x, const CommentRecord& y) {
    return std::tie(x.author_id, x.created, x.message_id) <
           std::tie(y.author_id, y.created, y.message_id);
  });
  corpus.posts_ = std::move(posts);
  corpus.comments_ = std::move(comments);

  corpus.post_slot_.reserve(corpus.posts_.size());
  for (std::size_t i = 0; i < corpus.posts_.size(); ++i) {
    corpus.post_slot_.emplace(corpus.posts_[i].message_id, i);
  }
  corpus.comment_slot_.reserve(corpus.comments_.size());
  for (std::size_t i = 0; i < corpus.comments_.size(); ++i) {
    corpus.comment_slot_.emplace(corpus.comments_[i].message_id, i);
  }
  corpus.posts_by_author_ =
      group_sorted(corpus.posts_, [](const PostRecord& p) { return p.author_id; });
  corpus.comments_by_author_ =
      group_sorted(corpus.comments_, [](const CommentRecord& c) { return c.author_id; });

  const std::size_t n = corpus.comments_.size();
  std::vector<std::variant<ResolvedComment, ResolveFailure>> outcomes(n, ResolveFailure::orphan);
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    outcomes[i] = resolve(corpus.comments_[i], corpus);
  }

  corpus.resolved_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto* r = std::get_if<ResolvedComment>(&outcomes[i])) {
      corpus.resolved_.push_back(*r);
    } else {
      corpus.unresolved_.push_back({corpus.comments_[i], std::get<ResolveFailure>(outcomes[i])});
    }
  }
  std::sort(corpus.resolved_.begin(), corpus.resolved_.end(),
            [](const ResolvedComment& x, const ResolvedComment& y) {
              return std::tie(x.root_post_id, x.comment.created, x.comment.message_id) <
                     std::tie(y.root_post_id, y.comment.created, y.comment.message_id);
            });
  corpus.resolved_by_post_ =
      group_sorted(corpus.resolved_, [](const ResolvedComment& r) { return r.root_post_id; });
  return corpus;
}

std::span<const PostRecord> Corpus::posts_by_author(AccountId author) const {
  return group_span<std::span<const PostRecord>>(posts_, posts_by_author_, author);
}

std::span<const CommentRecord> Corpus::comments_by_author(AccountId author) const {
  return group_span<std::span<const CommentRecord>>(comments_, comments_by_author_, author);
}

std::span<const ResolvedComment> Corpus::comments_by_root_post(MessageId post) const {
  return group_span<std::span<const ResolvedComment>>(resolved_, resolved_by_post_, post);
}

const PostRecord* Corpus::find_post(MessageId id) const {
  auto it = post_slot_.find(id);
  return it == post_slot_.end() ? nullptr : &posts_[it->second];
}

const CommentRecord* Corpus::find_comment(MessageId id) const {
  auto it = comment_slot_.find(id);
  return it == comment_slot_.end() ? nullptr : &comments_[it->second];
}

std::size_t Corpus::orphan_count() const {
  return static_cast<std::size_t>(
      std::count_if(unresolved_.begin(), unresolved_.end(),
                    [](const auto& u) { return u.reason == ResolveFailure::orphan; }));
}

std::variant<ResolvedComment, ResolveFailure> resolve_parent_chain(MessageId comment_id,
                                                                   const Corpus& corpus) {
  const CommentRecord* comment = corpus.find_comment(comment_id);
  if (!comment) throw DomainError("comment " + std::to_string(comment_id) + " is not in the corpus");

  return resolve(*comment, corpus);
}

ContainerTree build_container_tree(const Corpus& corpus) {
  ContainerTree tree;
  const auto env = tree.add(ContainerKind::Environment, 0);
  const auto platform = tree.add(ContainerKind::Platform, 1, env);

  std::vector<AccountId> accounts = corpus.posts_by_author_index().keys;
  const auto& commenters = corpus.comments_by_author_index().keys;
  accounts.insert(accounts.end(), commenters.begin(), commenters.end());
  std::sort(accounts.begin(), accounts.end());
  accounts.erase(std::unique(accounts.begin(), accounts.end()), accounts.end());

  std::unordered_map<AccountId, std::size_t> account_node;
  account_node.reserve(accounts.size());
  for (AccountId a : accounts) account_node.emplace(a, tree.add(ContainerKind::Account, a, platform));
  for (const auto& p : corpus.posts()) {
    tree.add(ContainerKind::Message, p.message_id, account_node.at(p.author_id));
  }
  for (const auto& c : corpus.comments()) {
    tree.add(ContainerKind::Message, c.message_id, account_node.at(c.author_id));
  }
  return tree;
}

}  // namespace pubdyn
