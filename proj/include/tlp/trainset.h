#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlp/graph.h"
#include "tlp/ingest.h"

namespace tlp::trainset {

struct TrainInstance {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeTypeId etype = 0;
  int label = 0;

  bool operator==(const TrainInstance&) const = default;
};

// kJoint permutes the (dst, etype) column pairs with a single permutation;
// kIndependent permutes the two columns separately.
enum class ShuffleMode { kJoint, kIndependent };

struct SamplerConfig {
  std::uint64_t seed = 42;
  double neg_ratio = 1.0;
  std::optional<std::size_t> sample_size;  // none = keep everything
  ShuffleMode shuffle = ShuffleMode::kJoint;
};

// ceil(neg_ratio * |positives|) label-0 instances. Sources are kept in place;
// each full round permutes the target side of the whole positive list, and a
// fractional last round keeps a uniform random subset of its rows.
std::vector<TrainInstance> shuffle_negatives(std::span<const TrainInstance> positives,
                                             const SamplerConfig& cfg);

struct TrainSet {
  std::vector<TrainInstance> instances;
  std::size_t num_positives = 0;
  std::size_t raw_negatives = 0;
  std::size_t collisions = 0;
  std::size_t num_negatives = 0;  // after collision filtering, before subsampling
};

// Positives are all graph edges; shuffled negatives that coincide with a
// positive triple (undirected match on undirected graphs) are dropped.
TrainSet assemble_train_set(const MultiGraph& g, const SamplerConfig& cfg);

std::vector<TrainInstance> positives_of(const MultiGraph& g);

// Named-column numeric table.
struct ColumnTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct DropResult {
  ColumnTable table;
  std::vector<std::string> dropped;
};

// Drops every time column (timestamp, start/end time) and, for dataset B,
// every edge-feature column (names starting with "edge_feat").
DropResult drop_redundant_columns(const ColumnTable& table, ingest::DatasetKind kind);

// src,dst,etype,label with a header line.
void write_train_csv(const std::filesystem::path& path, std::span<const TrainInstance> rows);
std::vector<TrainInstance> read_train_csv(const std::filesystem::path& path);

}  // namespace tlp::trainset
