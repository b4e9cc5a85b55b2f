#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tlp {

using NodeId = std::uint32_t;
using EdgeTypeId = std::uint16_t;
using Timestamp = std::int64_t;

enum class Directedness : std::uint8_t { kUndirected = 0, kDirected = 1 };

struct TemporalEdge {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeTypeId etype = 0;
  Timestamp ts = 0;
  std::optional<std::vector<float>> feat;

  bool operator==(const TemporalEdge&) const = default;
};

// One adjacency record. Slots of a node are sorted by (neighbor, etype, ts).
struct AdjacencySlot {
  NodeId neighbor = 0;
  EdgeTypeId etype = 0;
  Timestamp ts = 0;

  auto operator<=>(const AdjacencySlot&) const = default;
};

// Offset added to item ids when a user-item graph is folded into one id
// space: 1 + the largest user id.
struct BipartiteOffset {
  std::int64_t offset_u = 1;

  bool operator==(const BipartiteOffset&) const = default;
};

NodeId remap_item_id(std::int64_t raw_id, bool is_item, BipartiteOffset offset);

// Dense row-major per-node feature table; dim == 0 means absent.
struct NodeFeatureTable {
  std::size_t dim = 0;
  std::vector<float> values;

  bool empty() const { return dim == 0; }
  std::span<const float> row(NodeId u) const {
    return {values.data() + static_cast<std::size_t>(u) * dim, dim};
  }
};

// Immutable CSR multigraph over typed, timestamped parallel edges.
class MultiGraph {
 public:
  MultiGraph() = default;

  // Throws GraphError naming the first offending edge index.
  static MultiGraph build(std::vector<TemporalEdge> edges, std::size_t num_nodes,
                          std::size_t num_edge_types, Directedness directedness,
                          NodeFeatureTable node_feats = {});

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edge_types() const { return num_edge_types_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_slots() const { return slots_.size(); }
  Directedness directedness() const { return directedness_; }
  bool undirected() const { return directedness_ == Directedness::kUndirected; }
  std::size_t edge_feature_dim() const { return edge_feature_dim_; }

  std::span<const TemporalEdge> edges() const { return edges_; }
  std::span<const std::size_t> csr_offsets() const { return offsets_; }
  std::span<const AdjacencySlot> slots() const { return slots_; }
  const NodeFeatureTable& node_features() const { return node_feats_; }

  // Throws GraphError when u is out of range.
  std::span<const AdjacencySlot> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const { return neighbors(u).size(); }

  // Number of edges joining u and v, optionally restricted to one edge type.
  // Undirected self-loops occupy two slots but count once.
  std::size_t multiplicity(NodeId u, NodeId v) const;
  std::size_t multiplicity(NodeId u, NodeId v, EdgeTypeId etype) const;

  // Raw slot counts in u's list (no self-loop halving).
  std::size_t slot_count(NodeId u, NodeId v) const;
  std::size_t slot_count(NodeId u, NodeId v, EdgeTypeId etype) const;

 private:
  std::span<const AdjacencySlot> neighbor_range(NodeId u, NodeId v) const;

  std::size_t num_nodes_ = 0;
  std::size_t num_edge_types_ = 0;
  Directedness directedness_ = Directedness::kUndirected;
  std::size_t edge_feature_dim_ = 0;
  std::vector<TemporalEdge> edges_;
  std::vector<std::size_t> offsets_ = {0};
  std::vector<AdjacencySlot> slots_;
  NodeFeatureTable node_feats_;
};

inline MultiGraph build_graph(std::vector<TemporalEdge> edges, std::size_t num_nodes,
                              std::size_t num_edge_types, Directedness directedness) {
  return MultiGraph::build(std::move(edges), num_nodes, num_edge_types, directedness);
}

inline std::span<const AdjacencySlot> neighbors(const MultiGraph& g, NodeId u) {
  return g.neighbors(u);
}

}  // namespace tlp
