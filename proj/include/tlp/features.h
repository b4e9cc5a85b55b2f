#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tlp/feature_matrix.h"
#include "tlp/graph.h"
#include "tlp/ingest.h"
#include "tlp/line.h"
#include "tlp/trainset.h"

namespace tlp::features {

struct NodeUnary {
  std::size_t degree = 0;  // adjacency slots, parallel edges counted
  std::size_t distinct_neighbors = 0;
  std::size_t distinct_etypes = 0;

  bool operator==(const NodeUnary&) const = default;
};

struct PairBinary {
  std::size_t one_hop = 0;
  std::size_t two_hop = 0;
  std::size_t distinct_etypes_between = 0;

  bool operator==(const PairBinary&) const = default;
};

struct Crossing {
  double cosine = 0.0;
  double dot = 0.0;
};

// kMultiplicity: sum over w of m(u,w) * m(w,v). kBinary: number of distinct
// intermediate nodes w.
enum class TwoHopMode { kMultiplicity, kBinary };

struct FeatureOptions {
  TwoHopMode two_hop = TwoHopMode::kMultiplicity;
  // Positive training rows are graph edges; with this set their own edge is
  // subtracted from the structural counts so they match held-out queries.
  bool exclude_self_edge = false;
};

// Cosine is 0 when either vector is all zeros. Throws on dimension mismatch.
Crossing crossing_features(std::span<const float> a, std::span<const float> b);
Crossing crossing_features(std::span<const double> a, std::span<const double> b);

NodeUnary node_unary(const MultiGraph& g, NodeId u);
// Paths and counts follow the adjacency lists: on undirected graphs u-v
// is symmetric, on directed graphs only u->v edges and u->w->v paths count.
// Two-hop intermediates exclude u and v.
PairBinary pair_binary(const MultiGraph& g, NodeId u, NodeId v,
                       TwoHopMode mode = TwoHopMode::kMultiplicity);
std::size_t triplet_count(const MultiGraph& g, NodeId u, NodeId v, EdgeTypeId r);

struct RawInputs {
  NodeId src_id = 0;
  NodeId dst_id = 0;
  EdgeTypeId etype = 0;
  std::vector<float> src_node_feats;
  std::vector<float> dst_node_feats;
};

struct FeatureRow {
  NodeUnary src;
  NodeUnary dst;
  PairBinary pair;
  std::size_t triplet = 0;
  Crossing crossing;
  RawInputs raw;

  // Fixed order: src unary (3), dst unary (3), pair (3), triplet (1),
  // crossing (2), raw (3 + 2 * node feature dim).
  std::vector<double> values() const;
  static std::vector<std::string> column_names(std::size_t node_feat_dim);
};

struct PairKey {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeTypeId etype = 0;
  bool is_graph_edge = false;  // positive training row built from an edge of g
};

// `emb` may be null, which leaves the crossing features at zero.
FeatureRow featurize(const MultiGraph& g, const embed::EmbeddingTable* emb, const PairKey& key,
                     const FeatureOptions& opts = {});
FeatureRow featurize(const MultiGraph& g, const embed::EmbeddingTable* emb,
                     const ingest::Query& q, const FeatureOptions& opts = {});
FeatureRow featurize(const MultiGraph& g, const embed::EmbeddingTable* emb,
                     const trainset::TrainInstance& t, const FeatureOptions& opts = {});

// Batch form; rows are split across `threads` workers, output order fixed.
std::vector<FeatureRow> featurize_all(const MultiGraph& g, const embed::EmbeddingTable* emb,
                                      std::span<const PairKey> keys, const FeatureOptions& opts,
                                      std::size_t threads = 1);

std::vector<PairKey> keys_of(std::span<const ingest::Query> queries);
std::vector<PairKey> keys_of(std::span<const trainset::TrainInstance> rows);

// Feature-family toggles. Column blocks appear in the order subgraph,
// crossing, raw, line; "line" appends the src and dst embedding vectors.
struct FeatureFamilies {
  bool raw = true;
  bool line = true;
  bool crossing = true;
  bool subgraph = true;

  // Throws when crossing is enabled without line, or nothing is enabled.
  void validate() const;
  std::string to_string() const;
  static FeatureFamilies parse(const std::string& text);  // "all" or "raw,line,..."

  bool operator==(const FeatureFamilies&) const = default;
};

std::vector<std::string> column_names(const FeatureFamilies& fam, std::size_t node_feat_dim,
                                      std::size_t emb_dim);

FeatureMatrix assemble(std::span<const FeatureRow> rows, const embed::EmbeddingTable* emb,
                       const FeatureFamilies& fam, std::size_t node_feat_dim,
                       std::vector<int> labels = {});

}  // namespace tlp::features
