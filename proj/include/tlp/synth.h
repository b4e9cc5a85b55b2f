#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "tlp/graph.h"
#include "tlp/ingest.h"

namespace tlp::synth {

// Planted-partition temporal multigraph. Node v belongs to community
// v mod num_communities.
struct SynthConfig {
  std::size_t num_nodes = 2000;
  std::size_t num_communities = 20;
  std::size_t num_edge_types = 8;
  double intra_edge_prob = 0.9;
  double inter_edge_prob = 0.002;
  // Probability that an edge takes its source community's preferred type
  // (community mod num_edge_types); otherwise the type is uniform.
  double type_affinity = 0.8;
  std::size_t num_edges_target = 100000;
  double test_fraction = 0.1;
  std::size_t multiplicity_cap = 16;
  Timestamp ts_begin = 1'600'000'000;
  Timestamp ts_span = 30 * 86'400;  // edges fall in [ts_begin, ts_begin + ts_span)
  Timestamp query_span = 7 * 86'400;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SynthData {
  MultiGraph graph;  // training edges only, num_nodes nodes
  std::vector<TemporalEdge> all_edges;  // generation order, before the split
  std::vector<ingest::Query> train_queries;  // train edges (1) and shuffled non-edges (0)
  std::vector<ingest::Query> test_queries;
  std::size_t intra_edges = 0;
  std::size_t inter_edges = 0;
};

NodeId community_of(NodeId v, const SynthConfig& cfg);

// Probability that one sampled edge is intra-community.
double intra_share(const SynthConfig& cfg);

// Test positives are whole held-out (src, dst, etype) triples: every
// parallel copy leaves the training graph. Throws when num_edges_target
// exceeds the reachable pairs times multiplicity_cap.
SynthData generate(const SynthConfig& cfg);

// edges.csv, train_queries.csv and test.csv in the kind-A layout.
void write_dataset(const std::filesystem::path& dir, const SynthData& data,
                   const SynthConfig& cfg);

}  // namespace tlp::synth
