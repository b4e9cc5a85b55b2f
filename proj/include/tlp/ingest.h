#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlp/graph.h"
#include "tlp/graph_io.h"
#include "tlp/kv_config.h"

namespace tlp::ingest {

// A: node-featured event graph. B: bipartite user-item graph with optional
// edge features; item ids are shifted by BipartiteOffset.
enum class DatasetKind { kA, kB };

DatasetKind parse_kind(const std::string& s);
std::string to_string(DatasetKind kind);

struct Query {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeTypeId etype = 0;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;
  std::optional<int> label;

  bool operator==(const Query&) const = default;
};

// Column positions of the headerless competition CSVs. Overridable through a
// key-value file (keys: delimiter, header, src_col, dst_col, etype_col,
// ts_col, feat_begin_col, start_col, end_col, label_col, node_id_col,
// node_feat_begin_col).
struct CsvLayout {
  char delimiter = ',';
  bool has_header = false;
  int src_col = 0;
  int dst_col = 1;
  int etype_col = 2;
  int ts_col = 3;
  int feat_begin_col = 4;
  int start_col = 3;
  int end_col = 4;
  int label_col = 5;
  int node_id_col = 0;
  int node_feat_begin_col = 1;

  static CsvLayout from_config(const KvConfig& cfg);
};

struct EdgeParseResult {
  std::vector<TemporalEdge> edges;
  std::optional<BipartiteOffset> offset;
  IdMap ids;
  std::size_t malformed_rows = 0;
  std::size_t edge_feature_dim = 0;
  std::size_t rows_with_features = 0;
};

// Order-preserving: row i of the file becomes edge i. Rows with too few
// columns are skipped and counted; non-integer fields raise ParseError.
EdgeParseResult parse_edges(const std::filesystem::path& path, DatasetKind kind,
                            const CsvLayout& layout = {});

struct QueryParseResult {
  std::vector<Query> queries;
  std::size_t unseen_nodes = 0;
};

// Unknown raw ids map to ids.sentinel() and are counted, never rejected.
QueryParseResult parse_queries(const std::filesystem::path& path, bool labeled,
                               DatasetKind kind, const IdMap& ids,
                               std::optional<BipartiteOffset> offset,
                               const CsvLayout& layout = {});

// Rows: node id, then feature columns. The table covers ids.size() + 1 nodes
// (the sentinel row stays zero); nodes absent from the file stay zero.
NodeFeatureTable parse_node_features(const std::filesystem::path& path, const IdMap& ids,
                                     const CsvLayout& layout = {});

// Undirected graph over ids.size() + 1 nodes; the last node is the sentinel.
GraphBundle make_bundle(EdgeParseResult parsed, NodeFeatureTable node_feats = {});

// Writes edges back in raw-id space, in the layout parse_edges reads.
void write_edges_csv(const std::filesystem::path& path, std::span<const TemporalEdge> edges,
                     const IdMap& ids, std::optional<BipartiteOffset> offset);

// Writes queries with dense ids (no id map); labels appended when present.
void write_queries_csv(const std::filesystem::path& path, std::span<const Query> queries);

}  // namespace tlp::ingest
