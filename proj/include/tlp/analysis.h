#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tlp/graph.h"
#include "tlp/ingest.h"
#include "tlp/metrics.h"

namespace tlp::analysis {

// Breakdown of labeled queries by whether their (src, dst[, etype]) key
// already occurs in the graph, timestamps ignored.
struct ExistenceReport {
  std::size_t total = 0;
  std::size_t exist_in_graph = 0;
  std::size_t exist_label1 = 0;
  std::size_t exist_label0 = 0;
  std::size_t notexist_label1 = 0;
  std::size_t notexist_label0 = 0;
  bool with_etype = false;

  bool operator==(const ExistenceReport&) const = default;
};

ExistenceReport existence_report(const MultiGraph& g, std::span<const ingest::Query> queries,
                                 bool with_etype);

// 1.0 when the query key exists in g, else 0.0.
std::vector<double> naive_predict(const MultiGraph& g, std::span<const ingest::Query> queries,
                                  bool with_etype);

enum class AggregateStat { kMode, kMean };

struct LabeledKey {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeTypeId etype = 0;
  int label = 0;
};

// Per-query prediction: mode (ties -> 1) or mean of the pool labels sharing
// the query's key; 0.5 when the key is absent from the pool. Keys are the
// ordered (src, dst[, etype]) tuple.
std::vector<double> aggregate_predictions(std::span<const LabeledKey> pool,
                                          std::span<const ingest::Query> queries,
                                          AggregateStat stat, bool with_etype);

eval::AucResult label_aggregate_bound(std::span<const LabeledKey> pool,
                                      std::span<const ingest::Query> queries,
                                      AggregateStat stat, bool with_etype);

// The pool is the labeled queries themselves. With leave_self_out each
// query's own label is excluded from its aggregate.
std::vector<double> aggregate_predictions_in_sample(std::span<const ingest::Query> queries,
                                                    AggregateStat stat, bool with_etype,
                                                    bool leave_self_out);
eval::AucResult label_aggregate_bound_in_sample(std::span<const ingest::Query> queries,
                                                AggregateStat stat, bool with_etype,
                                                bool leave_self_out);

std::vector<LabeledKey> to_labeled_keys(std::span<const ingest::Query> queries);

// Fraction of edges that carry a (non-empty) edge feature vector.
double edge_feature_density(std::span<const TemporalEdge> edges);

// Aligned text table (or CSV) over one or more reports.
std::string format_existence(std::span<const ExistenceReport> reports, bool as_csv);

}  // namespace tlp::analysis
