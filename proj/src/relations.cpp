#include "pubdyn/relations.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <utility>

namespace pubdyn {

void RelationGraph::add_relation(const NodeRef& a, const NodeRef& b, double weight,
                                 Direction direction) {
  if (direction != direction_) {
    throw RelationError("mixed_directionality",
                        "edge directedness differs from relation graph '" + target_identity_ + "'");
  }
  if (a.kind != b.kind) {
    throw RelationError("not_horizontal", "relation joins " + std::string(to_string(a.kind)) +
                                              " and " + std::string(to_string(b.kind)));
  }
  if (a.constituent != b.constituent || a.component != b.component) {
    throw RelationError("not_homogeneous", "relation joins different constituents/components");
  }
  if (level_ && (level_->kind != a.kind || level_->constituent != a.constituent ||
                 level_->component != a.component)) {
    throw RelationError("level_mismatch", "edge level differs from earlier edges of '" +
                                              target_identity_ + "'");
  }
  if (!level_) level_ = a;

  std::uint64_t from = a.id;
  std::uint64_t to = b.id;
  if (direction_ == Direction::undirected && to < from) std::swap(from, to);
  edges_.push_back({from, to, weight, 1, {weight}});
}

RelationGraph collapse_multi_edges(const RelationGraph& graph) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, Edge> merged;
  for (const Edge& e : graph.edges()) {
    auto [it, inserted] = merged.try_emplace({e.a, e.b}, e);
    if (inserted) continue;
    Edge& m = it->second;
    m.multiplicity += e.multiplicity;
    m.weight += e.weight;
    m.weights.insert(m.weights.end(), e.weights.begin(), e.weights.end());
  }
  RelationGraph out(graph.target_identity(), graph.direction());
  out.level_ = graph.level();
  out.edges_.reserve(merged.size());
  for (auto& [key, edge] : merged) out.edges_.push_back(std::move(edge));
  return out;
}

RelationGraph commentator_author_graph(const Corpus& corpus) {
  RelationGraph graph("commentator_to_post_author", Direction::directed);
  for (const ResolvedComment& rc : corpus.resolved()) {
    const PostRecord* post = corpus.find_post(rc.root_post_id);
    graph.add_relation({ContainerKind::Account, rc.comment.author_id},
                       {ContainerKind::Account, post->author_id}, 1.0);
  }
  return collapse_multi_edges(graph);
}

void write_edge_list(std::ostream& out, const RelationGraph& graph, char delimiter) {
  out << '#' << delimiter << 'a' << delimiter << 'b' << delimiter << "multiplicity" << delimiter
      << "aggregate_weight" << '\n';
  std::size_t row = 0;
  for (const Edge& e : graph.edges()) {
    out << ++row << delimiter << e.a << delimiter << e.b << delimiter << e.multiplicity
        << delimiter << e.weight << '\n';
  }
}

void write_key_value(std::ostream& out, const RelationGraph& graph) {
  const char sep = graph.directed() ? '>' : '-';
  for (const Edge& e : graph.edges()) {
    out << e.a << sep << e.b << '=' << e.multiplicity << ';' << e.weight << ';';
    for (std::size_t i = 0; i < e.weights.size(); ++i) {
      if (i) out << ',';
      out << e.weights[i];
    }
    out << '\n';
  }
}

}  // namespace pubdyn
