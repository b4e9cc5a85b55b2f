#include "tlp/analysis.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include "tlp/error.h"

namespace tlp::analysis {

namespace {

bool key_exists(const MultiGraph& g, const ingest::Query& q, bool with_etype) {
  if (q.src >= g.num_nodes() || q.dst >= g.num_nodes()) {
    throw Error("query node id outside the graph");
  }
  return with_etype ? g.slot_count(q.src, q.dst, q.etype) > 0 : g.slot_count(q.src, q.dst) > 0;
}

using Key = std::tuple<NodeId, NodeId, EdgeTypeId>;

Key make_key(NodeId src, NodeId dst, EdgeTypeId etype, bool with_etype) {
  return {src, dst, with_etype ? etype : EdgeTypeId{0}};
}

struct LabelCounts {
  std::size_t ones = 0;
  std::size_t zeros = 0;
};

double aggregate(LabelCounts c, AggregateStat stat) {
  const std::size_t n = c.ones + c.zeros;
  if (n == 0) return 0.5;
  if (stat == AggregateStat::kMean) return static_cast<double>(c.ones) / static_cast<double>(n);
  return c.ones >= c.zeros ? 1.0 : 0.0;
}

std::vector<int> labels_of(std::span<const ingest::Query> queries) {
  std::vector<int> labels;
  labels.reserve(queries.size());
  for (const auto& q : queries) {
    if (!q.label) throw Error("query without label");
    labels.push_back(*q.label);
  }
  return labels;
}

}  // namespace

ExistenceReport existence_report(const MultiGraph& g, std::span<const ingest::Query> queries,
                                 bool with_etype) {
  ExistenceReport r;
  r.with_etype = with_etype;
  for (const auto& q : queries) {
    if (!q.label) throw Error("existence report needs labeled queries");
    const bool exists = key_exists(g, q, with_etype);
    ++r.total;
    if (exists) {
      ++r.exist_in_graph;
      ++(*q.label == 1 ? r.exist_label1 : r.exist_label0);
    } else {
      ++(*q.label == 1 ? r.notexist_label1 : r.notexist_label0);
    }
  }
  return r;
}

std::vector<double> naive_predict(const MultiGraph& g, std::span<const ingest::Query> queries,
                                  bool with_etype) {
  std::vector<double> scores;
  scores.reserve(queries.size());
  for (const auto& q : queries) scores.push_back(key_exists(g, q, with_etype) ? 1.0 : 0.0);
  return scores;
}

std::vector<double> aggregate_predictions(std::span<const LabeledKey> pool,
                                          std::span<const ingest::Query> queries,
                                          AggregateStat stat, bool with_etype) {
  std::map<Key, LabelCounts> counts;
  for (const auto& k : pool) {
    auto& c = counts[make_key(k.src, k.dst, k.etype, with_etype)];
    ++(k.label == 1 ? c.ones : c.zeros);
  }
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const auto it = counts.find(make_key(q.src, q.dst, q.etype, with_etype));
    out.push_back(it == counts.end() ? 0.5 : aggregate(it->second, stat));
  }
  return out;
}

eval::AucResult label_aggregate_bound(std::span<const LabeledKey> pool,
                                      std::span<const ingest::Query> queries,
                                      AggregateStat stat, bool with_etype) {
  if (queries.empty()) throw Error("label aggregate bound: empty query list");
  const auto labels = labels_of(queries);
  const auto preds = aggregate_predictions(pool, queries, stat, with_etype);
  return eval::auc(preds, labels);
}

std::vector<double> aggregate_predictions_in_sample(std::span<const ingest::Query> queries,
                                                    AggregateStat stat, bool with_etype,
                                                    bool leave_self_out) {
  std::map<Key, LabelCounts> counts;
  for (const auto& q : queries) {
    if (!q.label) throw Error("query without label");
    auto& c = counts[make_key(q.src, q.dst, q.etype, with_etype)];
    ++(*q.label == 1 ? c.ones : c.zeros);
  }
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    LabelCounts c = counts[make_key(q.src, q.dst, q.etype, with_etype)];
    if (leave_self_out) --(*q.label == 1 ? c.ones : c.zeros);
    out.push_back(aggregate(c, stat));
  }
  return out;
}

eval::AucResult label_aggregate_bound_in_sample(std::span<const ingest::Query> queries,
                                                AggregateStat stat, bool with_etype,
                                                bool leave_self_out) {
  if (queries.empty()) throw Error("label aggregate bound: empty query list");
  const auto labels = labels_of(queries);
  const auto preds = aggregate_predictions_in_sample(queries, stat, with_etype, leave_self_out);
  return eval::auc(preds, labels);
}

std::vector<LabeledKey> to_labeled_keys(std::span<const ingest::Query> queries) {
  std::vector<LabeledKey> keys;
  keys.reserve(queries.size());
  for (const auto& q : queries) {
    if (!q.label) throw Error("query without label");
    keys.push_back({q.src, q.dst, q.etype, *q.label});
  }
  return keys;
}

double edge_feature_density(std::span<const TemporalEdge> edges) {
  if (edges.empty()) return 0.0;
  const auto n = std::count_if(edges.begin(), edges.end(),
                               [](const TemporalEdge& e) { return e.feat.has_value(); });
  return static_cast<double>(n) / static_cast<double>(edges.size());
}

std::string format_existence(std::span<const ExistenceReport> reports, bool as_csv) {
  std::string out;
  char buf[512];
  auto pct = [](std::size_t n, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total);
  };
  if (as_csv) {
    out = "edge_type,total,exist_in_graph,exist_label1,exist_label0,notexist_label1,notexist_label0\n";
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%zu,%zu,%zu,%zu\n",
                    r.with_etype ? "with" : "without", r.total, r.exist_in_graph,
                    r.exist_label1, r.exist_label0, r.notexist_label1, r.notexist_label0);
      out += buf;
    }
    return out;
  }
  std::snprintf(buf, sizeof(buf), "%-10s %8s %18s %18s %18s %18s %18s\n", "edge type", "total",
                "exist", "exist label=1", "exist label=0", "not exist label=1",
                "not exist label=0");
  out += buf;
  for (const auto& r : reports) {
    auto cell = [&](std::size_t n) {
      char c[64];
      std::snprintf(c, sizeof(c), "%zu (%.2f%%)", n, pct(n, r.total));
      return std::string(c);
    };
    std::snprintf(buf, sizeof(buf), "%-10s %8zu %18s %18s %18s %18s %18s\n",
                  r.with_etype ? "with" : "without", r.total, cell(r.exist_in_graph).c_str(),
                  cell(r.exist_label1).c_str(), cell(r.exist_label0).c_str(),
                  cell(r.notexist_label1).c_str(), cell(r.notexist_label0).c_str());
    out += buf;
  }
  return out;
}

}  // namespace tlp::analysis
