#include "tlp/graph.h"

#include <algorithm>
#include <cassert>
#include <string>

#include "tlp/error.h"

namespace tlp {

NodeId remap_item_id(std::int64_t raw_id, bool is_item, BipartiteOffset offset) {
  assert(raw_id >= 0 && offset.offset_u >= 1);
  return static_cast<NodeId>(is_item ? raw_id + offset.offset_u : raw_id);
}

MultiGraph MultiGraph::build(std::vector<TemporalEdge> edges, std::size_t num_nodes,
                             std::size_t num_edge_types, Directedness directedness,
                             NodeFeatureTable node_feats) {
  MultiGraph g;
  g.num_nodes_ = num_nodes;
  g.num_edge_types_ = num_edge_types;
  g.directedness_ = directedness;

  std::optional<std::size_t> feat_dim;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const TemporalEdge& e = edges[i];
    if (e.src >= num_nodes || e.dst >= num_nodes) {
      throw GraphError("node id out of range", i);
    }
    if (e.etype >= num_edge_types) throw GraphError("edge type out of range", i);
    if (e.feat) {
      if (!feat_dim) feat_dim = e.feat->size();
      if (e.feat->size() != *feat_dim) throw GraphError("edge feature dimension mismatch", i);
    }
  }
  g.edge_feature_dim_ = feat_dim.value_or(0);
  if (!node_feats.empty() && node_feats.values.size() != node_feats.dim * num_nodes) {
    throw GraphError("node feature table does not cover every node");
  }
  g.node_feats_ = std::move(node_feats);

  std::vector<std::size_t> counts(num_nodes + 1, 0);
  for (const TemporalEdge& e : edges) {
    ++counts[e.src + 1];
    if (directedness == Directedness::kUndirected) ++counts[e.dst + 1];
  }
  for (std::size_t u = 0; u < num_nodes; ++u) counts[u + 1] += counts[u];
  g.offsets_ = counts;

  g.slots_.resize(g.offsets_[num_nodes]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const TemporalEdge& e : edges) {
    g.slots_[cursor[e.src]++] = {e.dst, e.etype, e.ts};
    if (directedness == Directedness::kUndirected) {
      g.slots_[cursor[e.dst]++] = {e.src, e.etype, e.ts};
    }
  }
  for (std::size_t u = 0; u < num_nodes; ++u) {
    std::sort(g.slots_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
              g.slots_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
  }
  g.edges_ = std::move(edges);
  return g;
}

std::span<const AdjacencySlot> MultiGraph::neighbors(NodeId u) const {
  if (u >= num_nodes_) {
    throw GraphError("node " + std::to_string(u) + " out of range (num_nodes=" +
                     std::to_string(num_nodes_) + ")");
  }
  return {slots_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

std::span<const AdjacencySlot> MultiGraph::neighbor_range(NodeId u, NodeId v) const {
  const auto adj = neighbors(u);
  const auto lo = std::partition_point(adj.begin(), adj.end(),
                                       [v](const AdjacencySlot& s) { return s.neighbor < v; });
  const auto hi = std::partition_point(lo, adj.end(),
                                       [v](const AdjacencySlot& s) { return s.neighbor == v; });
  return {lo, hi};
}

std::size_t MultiGraph::slot_count(NodeId u, NodeId v) const {
  return neighbor_range(u, v).size();
}

std::size_t MultiGraph::slot_count(NodeId u, NodeId v, EdgeTypeId etype) const {
  const auto range = neighbor_range(u, v);
  const auto lo = std::partition_point(range.begin(), range.end(),
                                       [etype](const AdjacencySlot& s) { return s.etype < etype; });
  const auto hi = std::partition_point(
      lo, range.end(), [etype](const AdjacencySlot& s) { return s.etype == etype; });
  return static_cast<std::size_t>(hi - lo);
}

std::size_t MultiGraph::multiplicity(NodeId u, NodeId v) const {
  const std::size_t n = slot_count(u, v);
  return (u == v && undirected()) ? n / 2 : n;
}

std::size_t MultiGraph::multiplicity(NodeId u, NodeId v, EdgeTypeId etype) const {
  const std::size_t n = slot_count(u, v, etype);
  return (u == v && undirected()) ? n / 2 : n;
}

}  // namespace tlp
