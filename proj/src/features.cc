#include "tlp/features.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "tlp/error.h"

namespace tlp::features {

namespace {

template <typename T>
Crossing crossing_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw Error("crossing features: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  Crossing c;
  c.dot = dot;
  if (na > 0.0 && nb > 0.0) c.cosine = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return c;
}

// Slots of u grouped into runs of equal neighbor.
template <typename Fn>
void for_each_neighbor_run(std::span<const AdjacencySlot> adj, Fn&& fn) {
  std::size_t i = 0;
  while (i < adj.size()) {
    std::size_t j = i + 1;
    while (j < adj.size() && adj[j].neighbor == adj[i].neighbor) ++j;
    fn(adj[i].neighbor, j - i);
    i = j;
  }
}

std::size_t slots_with_etype(const MultiGraph& g, NodeId u, EdgeTypeId r) {
  std::size_t n = 0;
  for (const auto& s : g.neighbors(u)) n += s.etype == r;
  return n;
}

}  // namespace

Crossing crossing_features(std::span<const float> a, std::span<const float> b) {
  return crossing_impl(a, b);
}

Crossing crossing_features(std::span<const double> a, std::span<const double> b) {
  return crossing_impl(a, b);
}

NodeUnary node_unary(const MultiGraph& g, NodeId u) {
  const auto adj = g.neighbors(u);
  NodeUnary out;
  out.degree = adj.size();
  for_each_neighbor_run(adj, [&](NodeId, std::size_t) { ++out.distinct_neighbors; });
  std::vector<EdgeTypeId> types;
  types.reserve(adj.size());
  for (const auto& s : adj) types.push_back(s.etype);
  std::sort(types.begin(), types.end());
  out.distinct_etypes = static_cast<std::size_t>(std::unique(types.begin(), types.end()) - types.begin());
  return out;
}

PairBinary pair_binary(const MultiGraph& g, NodeId u, NodeId v, TwoHopMode mode) {
  PairBinary out;
  out.one_hop = g.multiplicity(u, v);
  {
    const auto adj = g.neighbors(u);
    const auto lo = std::partition_point(adj.begin(), adj.end(),
                                         [v](const AdjacencySlot& s) { return s.neighbor < v; });
    std::size_t distinct = 0;
    for (auto it = lo; it != adj.end() && it->neighbor == v; ++it) {
      if (it == lo || it->etype != (it - 1)->etype) ++distinct;
    }
    out.distinct_etypes_between = distinct;
  }
  auto weigh = [mode](std::size_t a, std::size_t b) -> std::size_t {
    return mode == TwoHopMode::kBinary ? 1 : a * b;
  };
  if (g.undirected()) {
    // Merge the two sorted adjacency lists; m(w, v) == m(v, w).
    const auto au = g.neighbors(u);
    const auto av = g.neighbors(v);
    std::size_t i = 0, j = 0;
    while (i < au.size() && j < av.size()) {
      const NodeId wu = au[i].neighbor;
      const NodeId wv = av[j].neighbor;
      if (wu < wv) {
        while (i < au.size() && au[i].neighbor == wu) ++i;
      } else if (wv < wu) {
        while (j < av.size() && av[j].neighbor == wv) ++j;
      } else {
        std::size_t mi = 0, mj = 0;
        while (i < au.size() && au[i].neighbor == wu) ++i, ++mi;
        while (j < av.size() && av[j].neighbor == wv) ++j, ++mj;
        if (wu != u && wu != v) out.two_hop += weigh(mi, mj);
      }
    }
  } else {
    for_each_neighbor_run(g.neighbors(u), [&](NodeId w, std::size_t m_uw) {
      if (w == u || w == v) return;
      const std::size_t m_wv = g.slot_count(w, v);
      if (m_wv) out.two_hop += weigh(m_uw, m_wv);
    });
  }
  return out;
}

std::size_t triplet_count(const MultiGraph& g, NodeId u, NodeId v, EdgeTypeId r) {
  return g.multiplicity(u, v, r);
}

std::vector<double> FeatureRow::values() const {
  std::vector<double> v = {
      static_cast<double>(src.degree),          static_cast<double>(src.distinct_neighbors),
      static_cast<double>(src.distinct_etypes), static_cast<double>(dst.degree),
      static_cast<double>(dst.distinct_neighbors), static_cast<double>(dst.distinct_etypes),
      static_cast<double>(pair.one_hop),        static_cast<double>(pair.two_hop),
      static_cast<double>(pair.distinct_etypes_between), static_cast<double>(triplet),
      crossing.cosine,                          crossing.dot,
      static_cast<double>(raw.src_id),          static_cast<double>(raw.dst_id),
      static_cast<double>(raw.etype)};
  for (float f : raw.src_node_feats) v.push_back(f);
  for (float f : raw.dst_node_feats) v.push_back(f);
  return v;
}

namespace {

const std::vector<std::string>& subgraph_names() {
  static const std::vector<std::string> kNames = {
      "src_degree", "src_distinct_neighbors", "src_distinct_etypes",
      "dst_degree", "dst_distinct_neighbors", "dst_distinct_etypes",
      "one_hop",    "two_hop",                "distinct_etypes_between",
      "triplet_count"};
  return kNames;
}

void append_raw_names(std::vector<std::string>& names, std::size_t node_feat_dim) {
  names.insert(names.end(), {"src_id", "dst_id", "etype"});
  for (std::size_t i = 0; i < node_feat_dim; ++i) names.push_back("src_nf_" + std::to_string(i));
  for (std::size_t i = 0; i < node_feat_dim; ++i) names.push_back("dst_nf_" + std::to_string(i));
}

}  // namespace

std::vector<std::string> FeatureRow::column_names(std::size_t node_feat_dim) {
  std::vector<std::string> names = subgraph_names();
  names.insert(names.end(), {"cosine", "dot"});
  append_raw_names(names, node_feat_dim);
  return names;
}

FeatureRow featurize(const MultiGraph& g, const embed::EmbeddingTable* emb, const PairKey& key,
                     const FeatureOptions& opts) {
  const NodeId u = key.src;
  const NodeId v = key.dst;
  FeatureRow row;
  row.src = node_unary(g, u);
  row.dst = node_unary(g, v);
  row.pair = pair_binary(g, u, v, opts.two_hop);
  row.triplet = triplet_count(g, u, v, key.etype);

  if (opts.exclude_self_edge && key.is_graph_edge && row.triplet > 0) {
    // Remove one (u, v, etype) edge: s slots leave u's list (2 for an
    // undirected self-loop) and, when undirected and u != v, one leaves v's.
    const bool loop = u == v;
    const std::size_t s = (loop && g.undirected()) ? 2 : 1;
    auto shrink = [&](NodeUnary& nu, NodeId a, NodeId b, std::size_t removed) {
      const bool last_neighbor = g.slot_count(a, b) == removed;
      const bool last_type = slots_with_etype(g, a, key.etype) == removed;
      nu.degree -= removed;
      nu.distinct_neighbors -= last_neighbor;
      nu.distinct_etypes -= last_type;
    };
    if (loop) {
      shrink(row.src, u, u, s);
      row.dst = row.src;
    } else {
      shrink(row.src, u, v, 1);
      if (g.undirected()) shrink(row.dst, v, u, 1);
    }
    row.pair.distinct_etypes_between -= row.triplet == 1;
    row.pair.one_hop -= 1;
    row.triplet -= 1;
  }

  if (emb) {
    if (emb->num_nodes != g.num_nodes()) throw Error("embeddings and graph disagree on node count");
    row.crossing = crossing_features(emb->row(u), emb->row(v));
  }
  row.raw.src_id = u;
  row.raw.dst_id = v;
  row.raw.etype = key.etype;
  const auto& nf = g.node_features();
  if (!nf.empty()) {
    const auto a = nf.row(u);
    const auto b = nf.row(v);
    row.raw.src_node_feats.assign(a.begin(), a.end());
    row.raw.dst_node_feats.assign(b.begin(), b.end());
  }
  return row;
}

FeatureRow featurize(const MultiGraph& g, const embed::EmbeddingTable* emb,
                     const ingest::Query& q, const FeatureOptions& opts) {
  return featurize(g, emb, PairKey{q.src, q.dst, q.etype, false}, opts);
}

FeatureRow featurize(const MultiGraph& g, const embed::EmbeddingTable* emb,
                     const trainset::TrainInstance& t, const FeatureOptions& opts) {
  return featurize(g, emb, PairKey{t.src, t.dst, t.etype, t.label == 1}, opts);
}

std::vector<FeatureRow> featurize_all(const MultiGraph& g, const embed::EmbeddingTable* emb,
                                      std::span<const PairKey> keys, const FeatureOptions& opts,
                                      std::size_t threads) {
  std::vector<FeatureRow> rows(keys.size());
  threads = std::max<std::size_t>(1, std::min(threads, keys.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < keys.size(); ++i) rows[i] = featurize(g, emb, keys[i], opts);
    return rows;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (keys.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::size_t end = std::min(keys.size(), (t + 1) * chunk);
        for (std::size_t i = t * chunk; i < end; ++i) rows[i] = featurize(g, emb, keys[i], opts);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<PairKey> keys_of(std::span<const ingest::Query> queries) {
  std::vector<PairKey> keys;
  keys.reserve(queries.size());
  for (const auto& q : queries) keys.push_back({q.src, q.dst, q.etype, false});
  return keys;
}

std::vector<PairKey> keys_of(std::span<const trainset::TrainInstance> rows) {
  std::vector<PairKey> keys;
  keys.reserve(rows.size());
  for (const auto& t : rows) keys.push_back({t.src, t.dst, t.etype, t.label == 1});
  return keys;
}

void FeatureFamilies::validate() const {
  if (crossing && !line) throw Error("feature family 'crossing' requires 'line'");
  if (!raw && !line && !crossing && !subgraph) throw Error("no feature family enabled");
}

std::string FeatureFamilies::to_string() const {
  std::string out;
  auto add = [&out](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(raw, "raw");
  add(line, "line");
  add(crossing, "crossing");
  add(subgraph, "subgraph");
  return out;
}

FeatureFamilies FeatureFamilies::parse(const std::string& text) {
  if (text == "all") return FeatureFamilies{};
  FeatureFamilies f{false, false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "raw") {
      f.raw = true;
    } else if (item == "line") {
      f.line = true;
    } else if (item == "crossing") {
      f.crossing = true;
    } else if (item == "subgraph") {
      f.subgraph = true;
    } else if (!item.empty()) {
      throw Error("unknown feature family '" + item + "'");
    }
  }
  f.validate();
  return f;
}

std::vector<std::string> column_names(const FeatureFamilies& fam, std::size_t node_feat_dim,
                                      std::size_t emb_dim) {
  std::vector<std::string> names;
  if (fam.subgraph) names = subgraph_names();
  if (fam.crossing) names.insert(names.end(), {"cosine", "dot"});
  if (fam.raw) append_raw_names(names, node_feat_dim);
  if (fam.line) {
    for (std::size_t i = 0; i < emb_dim; ++i) names.push_back("src_emb_" + std::to_string(i));
    for (std::size_t i = 0; i < emb_dim; ++i) names.push_back("dst_emb_" + std::to_string(i));
  }
  return names;
}

FeatureMatrix assemble(std::span<const FeatureRow> rows, const embed::EmbeddingTable* emb,
                       const FeatureFamilies& fam, std::size_t node_feat_dim,
                       std::vector<int> labels) {
  fam.validate();
  if ((fam.line || fam.crossing) && !emb) throw Error("line/crossing features need embeddings");
  if (!labels.empty() && labels.size() != rows.size()) throw Error("label count mismatch");
  FeatureMatrix m;
  m.names = column_names(fam, node_feat_dim, fam.line ? emb->dim : 0);
  m.rows = rows.size();
  m.values.reserve(m.rows * m.cols());
  for (const FeatureRow& r : rows) {
    const std::vector<double> base = r.values();
    if (fam.subgraph) m.values.insert(m.values.end(), base.begin(), base.begin() + 10);
    if (fam.crossing) m.values.insert(m.values.end(), base.begin() + 10, base.begin() + 12);
    if (fam.raw) {
      if (r.raw.src_node_feats.size() != node_feat_dim) throw Error("node feature width mismatch");
      m.values.insert(m.values.end(), base.begin() + 12, base.end());
    }
    if (fam.line) {
      for (float f : emb->row(r.raw.src_id)) m.values.push_back(f);
      for (float f : emb->row(r.raw.dst_id)) m.values.push_back(f);
    }
  }
  m.labels = std::move(labels);
  return m;
}

}  // namespace tlp::features
