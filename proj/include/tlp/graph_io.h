#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tlp/graph.h"

namespace tlp {

// Raw id -> dense id map built at ingestion. Dense ids are [0, size());
// the id size() is reserved for unseen nodes (the cold-start sentinel).
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::int64_t> raw_of_dense);

  // Dense ids follow the sorted order of the distinct raw ids.
  static IdMap from_raw_ids(std::vector<std::int64_t> raw_ids);
  // Raw id k maps to dense id k for k in [0, n).
  static IdMap identity(std::size_t n);

  std::optional<NodeId> find(std::int64_t raw) const;
  std::int64_t raw_of(NodeId dense) const { return raw_of_dense_.at(dense); }
  std::size_t size() const { return raw_of_dense_.size(); }
  NodeId sentinel() const { return static_cast<NodeId>(raw_of_dense_.size()); }
  const std::vector<std::int64_t>& raw_ids() const { return raw_of_dense_; }

  bool operator==(const IdMap& other) const { return raw_of_dense_ == other.raw_of_dense_; }

 private:
  std::vector<std::int64_t> raw_of_dense_;
  std::unordered_map<std::int64_t, NodeId> dense_of_raw_;
};

// A graph together with the id bookkeeping needed to map later query files.
struct GraphBundle {
  MultiGraph graph;
  IdMap ids;
  std::optional<BipartiteOffset> offset;
};

// Binary layout (little-endian):
//   "TLPG" u32 version | u32 num_nodes | u32 num_edge_types | u8 directed |
//   u64 num_edges | num_edges x {u32 src, u32 dst, u16 etype, i64 ts} |
//   u32 node_feat_dim | num_nodes x dim f32 |
//   u64 map_size | map_size x i64 raw id | i64 offset_u (-1 when absent)
inline constexpr std::uint32_t kGraphFormatVersion = 1;

void save_graph(const std::filesystem::path& path, const GraphBundle& bundle);
GraphBundle load_graph(const std::filesystem::path& path);

// Sidecar text map: optional "# offset_u N" line, then "raw dense" pairs.
void save_id_map_text(const std::filesystem::path& path, const IdMap& ids,
                      std::optional<BipartiteOffset> offset);
std::pair<IdMap, std::optional<BipartiteOffset>> load_id_map_text(
    const std::filesystem::path& path);

}  // namespace tlp
