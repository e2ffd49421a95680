#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pubdyn/corpus.hpp"
#include "pubdyn/error.hpp"

namespace pubdyn {

enum class Constituent : std::uint8_t { contents, metadata };
enum class Component : std::uint8_t { data, sense };
enum class Direction : std::uint8_t { directed, undirected };

/// One endpoint of a relation: a container plus the constituent/component
/// the relation is established on.
struct NodeRef {
  ContainerKind kind = ContainerKind::Account;
  std::uint64_t id = 0;
  Constituent constituent = Constituent::metadata;
  Component component = Component::data;
};

struct Edge {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  double weight = 0.0;  // aggregate (sum) after collapse
  std::uint64_t multiplicity = 1;
  std::vector<double> weights;  // every merged edge weight, in insertion order

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Raised when an edge breaks the relation constraints. code() is one of
/// "not_horizontal", "not_homogeneous", "level_mismatch", "mixed_directionality".
class RelationError : public Error {
 public:
  RelationError(std::string code, const std::string& what)
      : Error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Edges of a single target identity. All edges share the graph's
/// directedness; undirected edges are stored with a <= b.
class RelationGraph {
 public:
  RelationGraph(std::string target_identity, Direction direction)
      : target_identity_(std::move(target_identity)), direction_(direction) {}

  void add_relation(const NodeRef& a, const NodeRef& b, double weight, Direction direction);
  void add_relation(const NodeRef& a, const NodeRef& b, double weight = 1.0) {
    add_relation(a, b, weight, direction_);
  }

  const std::string& target_identity() const { return target_identity_; }
  Direction direction() const { return direction_; }
  bool directed() const { return direction_ == Direction::directed; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<NodeRef> level() const { return level_; }

 private:
  friend RelationGraph collapse_multi_edges(const RelationGraph& graph);

  std::string target_identity_;
  Direction direction_;
  std::optional<NodeRef> level_;  // kind/facet fixed by the first edge
  std::vector<Edge> edges_;
};

/// One edge per (ordered or unordered) pair, ordered by (a, b). Multiplicities
/// and weights of merged edges add up; the weight list is concatenated.
RelationGraph collapse_multi_edges(const RelationGraph& graph);

/// Directed commentator -> post author graph over resolved comments, collapsed.
RelationGraph commentator_author_graph(const Corpus& corpus);

/// Relational export: row#, a, b, multiplicity, aggregate_weight.
void write_edge_list(std::ostream& out, const RelationGraph& graph, char delimiter = '\t');
/// Key-value export: "a>b" (or "a-b" when undirected) = multiplicity;weight;w1,w2,...
void write_key_value(std::ostream& out, const RelationGraph& graph);

}  // namespace pubdyn
