#pragma once

#include <cstdint>
#include <vector>

namespace pubdyn {

using MessageId = std::uint64_t;
using AccountId = std::uint64_t;
using UnixSeconds = std::int64_t;

struct PostRecord {
  MessageId message_id = 0;
  AccountId author_id = 0;
  UnixSeconds created = 0;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

/// parent_id names either a post or another comment.
struct CommentRecord {
  MessageId message_id = 0;
  AccountId author_id = 0;
  UnixSeconds created = 0;
  MessageId parent_id = 0;

  friend bool operator==(const CommentRecord&, const CommentRecord&) = default;
};

using PostTable = std::vector<PostRecord>;
using CommentTable = std::vector<CommentRecord>;

}  // namespace pubdyn
