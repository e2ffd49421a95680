#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pubdyn/records.hpp"

namespace pubdyn {

/// Container levels, outermost first: Environment > Platform > Account >
/// Message > Block.
enum class ContainerKind : std::uint8_t { Environment = 0, Platform, Account, Message, Block };

std::string_view to_string(ContainerKind kind);

/// Payloads are opaque: the library never interprets message content.
using Payload = std::string;

struct ContainerNode {
  ContainerKind kind = ContainerKind::Environment;
  std::uint64_t id = 0;
  std::optional<std::size_t> parent;  // index into the owning ContainerTree
  Payload contents_explicit;
  Payload contents_implicit;
  Payload metadata_explicit;
  Payload metadata_implicit;
};

/// Flat storage of the container hierarchy. Every non-Environment node hangs
/// under a node exactly one level up.
class ContainerTree {
 public:
  /// Throws DomainError when the parent level is wrong or missing.
  std::size_t add(ContainerKind kind, std::uint64_t id, std::optional<std::size_t> parent = {});

  const ContainerNode& node(std::size_t index) const { return nodes_.at(index); }
  ContainerNode& node(std::size_t index) { return nodes_.at(index); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t count(ContainerKind kind) const;

 private:
  std::vector<ContainerNode> nodes_;
};

enum class ResolveFailure : std::uint8_t { orphan, cycle, depth_exceeded };

std::string_view to_string(ResolveFailure failure);

struct ResolvedComment {
  CommentRecord comment;
  MessageId root_post_id = 0;
  std::uint32_t depth = 0;  // parent hops; 1 for a direct reply to a post

  friend bool operator==(const ResolvedComment&, const ResolvedComment&) = default;
};

struct UnresolvedComment {
  CommentRecord comment;
  ResolveFailure reason = ResolveFailure::orphan;
};

struct CorpusOptions {
  std::uint32_t max_depth = 64;
  int threads = 0;
};

/// Contiguous groups over a sorted record array: group i has key keys[i] and
/// spans [offsets[i], offsets[i+1]).
struct GroupIndex {
  std::vector<std::uint64_t> keys;
  std::vector<std::size_t> offsets{0};

  std::size_t size() const { return keys.size(); }
  std::optional<std::size_t> find(std::uint64_t key) const;
};

/// Immutable, indexed view of one ingested corpus.
///
/// posts() is ordered by (author, created, message_id), comments() likewise,
/// and resolved() by (root post, created, message_id), so every derived
/// statistic is independent of input row order.
class Corpus {
 public:
  const std::vector<PostRecord>& posts() const { return posts_; }
  const std::vector<CommentRecord>& comments() const { return comments_; }
  const std::vector<ResolvedComment>& resolved() const { return resolved_; }
  const std::vector<UnresolvedComment>& unresolved() const { return unresolved_; }

  const GroupIndex& posts_by_author_index() const { return posts_by_author_; }
  const GroupIndex& comments_by_author_index() const { return comments_by_author_; }
  const GroupIndex& resolved_by_post_index() const { return resolved_by_post_; }

  std::span<const PostRecord> posts_by_author(AccountId author) const;
  std::span<const CommentRecord> comments_by_author(AccountId author) const;
  std::span<const ResolvedComment> comments_by_root_post(MessageId post) const;

  const PostRecord* find_post(MessageId id) const;
  const CommentRecord* find_comment(MessageId id) const;

  std::uint32_t max_depth() const { return max_depth_; }
  std::size_t orphan_count() const;
  bool empty() const { return posts_.empty() && comments_.empty(); }

 private:
  friend Corpus build_corpus(std::vector<PostRecord>, std::vector<CommentRecord>,
                             const CorpusOptions&);

  std::vector<PostRecord> posts_;
  std::vector<CommentRecord> comments_;
  std::vector<ResolvedComment> resolved_;
  std::vector<UnresolvedComment> unresolved_;
  GroupIndex posts_by_author_;
  GroupIndex comments_by_author_;
  GroupIndex resolved_by_post_;
  std::unordered_map<MessageId, std::size_t> post_slot_;
  std::unordered_map<MessageId, std::size_t> comment_slot_;
  std::uint32_t max_depth_ = 64;
};

/// Sorts and indexes the records and resolves every comment to its root post.
/// Comments that cannot be resolved land in unresolved().
Corpus build_corpus(std::vector<PostRecord> posts, std::vector<CommentRecord> comments,
                    const CorpusOptions& options = {});

/// Follows parent links from `comment_id` until a post is reached. Throws
/// DomainError if the comment itself is not in the corpus.
std::variant<ResolvedComment, ResolveFailure> resolve_parent_chain(MessageId comment_id,
                                                                   const Corpus& corpus);

/// Environment -> Platform -> Account -> Message nodes for the whole corpus.
/// Blocks are never instantiated.
ContainerTree build_container_tree(const Corpus& corpus);

}  // namespace pubdyn
