#include "tlp/synth.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "tlp/error.h"
#include "tlp/rng.h"
#include "tlp/trainset.h"

namespace tlp::synth {

namespace {

std::size_t community_size(std::size_t c, const SynthConfig& cfg) {
  return cfg.num_nodes / cfg.num_communities + (c < cfg.num_nodes % cfg.num_communities ? 1 : 0);
}

std::uint64_t intra_pairs(const SynthConfig& cfg) {
  std::uint64_t total = 0;
  for (std::size_t c = 0; c < cfg.num_communities; ++c) {
    const std::uint64_t s = community_size(c, cfg);
    total += s * (s - (s > 0 ? 1 : 0)) / 2;
  }
  return total;
}

std::uint64_t all_pairs(const SynthConfig& cfg) {
  const std::uint64_t n = cfg.num_nodes;
  return n * (n - 1) / 2;
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct TripleKey {
  NodeId a, b;
  EdgeTypeId r;
  bool operator==(const TripleKey&) const = default;
};

TripleKey canonical(NodeId u, NodeId v, EdgeTypeId r) { return {std::min(u, v), std::max(u, v), r}; }

struct TripleHash {
  std::size_t operator()(const TripleKey& k) const {
    return std::hash<std::uint64_t>{}(pair_key(k.a, k.b) * 31 + k.r);
  }
};

using TripleSet = std::unordered_set<TripleKey, TripleHash>;

// Shuffled (dst, etype) negatives that are neither true triples nor self-loops.
std::vector<trainset::TrainInstance> negatives_for(std::span<const trainset::TrainInstance> pos,
                                                   const TripleSet& truth, std::uint64_t seed) {
  trainset::SamplerConfig sc;
  sc.seed = seed;
  std::vector<trainset::TrainInstance> out;
  for (const auto& n : trainset::shuffle_negatives(pos, sc)) {
    if (n.src == n.dst || truth.count(canonical(n.src, n.dst, n.etype))) continue;
    out.push_back(n);
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_nodes < 2) throw Error("synth: num_nodes must be >= 2");
  if (num_communities < 1 || num_communities > num_nodes) {
    throw Error("synth: num_communities must be in [1, num_nodes]");
  }
  if (num_edge_types < 1 || num_edge_types > 65535) throw Error("synth: num_edge_types must be in [1, 65535]");
  if (!(inter_edge_prob >= 0.0 && intra_edge_prob <= 1.0)) throw Error("synth: edge probabilities must be in [0, 1]");
  if (!(intra_edge_prob > inter_edge_prob)) throw Error("synth: intra_edge_prob must exceed inter_edge_prob");
  if (!(type_affinity >= 0.0 && type_affinity <= 1.0)) throw Error("synth: type_affinity must be in [0, 1]");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw Error("synth: test_fraction must be in [0, 1)");
  if (num_edges_target < 1) throw Error("synth: num_edges_target must be >= 1");
  if (multiplicity_cap < 1) throw Error("synth: multiplicity_cap must be >= 1");
  if (ts_span < 1 || query_span < 1) throw Error("synth: time spans must be >= 1");
}

NodeId community_of(NodeId v, const SynthConfig& cfg) {
  return static_cast<NodeId>(v % cfg.num_communities);
}

double intra_share(const SynthConfig& cfg) {
  const double pin = static_cast<double>(intra_pairs(cfg)) * cfg.intra_edge_prob;
  const double pout = static_cast<double>(all_pairs(cfg) - intra_pairs(cfg)) * cfg.inter_edge_prob;
  if (pin + pout <= 0.0) return 0.0;
  return pin / (pin + pout);
}

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  const std::uint64_t n_in = intra_pairs(cfg);
  const std::uint64_t n_out = all_pairs(cfg) - n_in;
  const std::uint64_t reachable = (cfg.intra_edge_prob > 0 ? n_in : 0) + (cfg.inter_edge_prob > 0 ? n_out : 0);
  if (reachable == 0 || static_cast<double>(cfg.num_edges_target) >
                            static_cast<double>(reachable) * static_cast<double>(cfg.multiplicity_cap)) {
    throw Error("synth: num_edges_target " + std::to_string(cfg.num_edges_target) +
                " exceeds reachable pairs x multiplicity cap");
  }
  const double q = intra_share(cfg);

  // Cumulative intra pair counts by community for weighted selection.
  std::vector<std::uint64_t> cum(cfg.num_communities);
  {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < cfg.num_communities; ++c) {
      const std::uint64_t s = community_size(c, cfg);
      acc += s * (s - (s > 0 ? 1 : 0)) / 2;
      cum[c] = acc;
    }
  }
  auto member = [&cfg](std::size_t c, std::uint64_t k) {
    return static_cast<NodeId>(c + k * cfg.num_communities);
  };

  Rng rng(derive_seed(cfg.seed, 21));
  SynthData data;
  std::unordered_map<std::uint64_t, std::uint32_t> mult;
  data.all_edges.reserve(cfg.num_edges_target);
  while (data.all_edges.size() < cfg.num_edges_target) {
    const bool intra = rng.uniform01() < q;
    NodeId u = 0, v = 0;
    if (intra) {
      const std::uint64_t pick = rng.uniform_index(n_in);
      const std::size_t c = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin());
      const std::uint64_t s = community_size(c, cfg);
      const std::uint64_t a = rng.uniform_index(s);
      std::uint64_t b = rng.uniform_index(s - 1);
      if (b >= a) ++b;
      u = member(c, a);
      v = member(c, b);
    } else {
      do {
        u = static_cast<NodeId>(rng.uniform_index(cfg.num_nodes));
        v = static_cast<NodeId>(rng.uniform_index(cfg.num_nodes));
      } while (u == v || community_of(u, cfg) == community_of(v, cfg));
    }
    auto& m = mult[pair_key(u, v)];
    if (m >= cfg.multiplicity_cap) continue;
    ++m;
    const auto preferred = static_cast<EdgeTypeId>(community_of(u, cfg) % cfg.num_edge_types);
    const EdgeTypeId etype = rng.bernoulli(cfg.type_affinity)
                                 ? preferred
                                 : static_cast<EdgeTypeId>(rng.uniform_index(cfg.num_edge_types));
    const Timestamp ts = cfg.ts_begin + static_cast<Timestamp>(rng.uniform_index(static_cast<std::uint64_t>(cfg.ts_span)));
    data.all_edges.push_back({u, v, etype, ts, {}});
    (intra ? data.intra_edges : data.inter_edges) += 1;
  }

  // Hold out whole triples in first-occurrence order after a shuffle.
  TripleSet truth;
  std::vector<TripleKey> distinct;
  for (const auto& e : data.all_edges) {
    if (truth.insert(canonical(e.src, e.dst, e.etype)).second) distinct.push_back(canonical(e.src, e.dst, e.etype));
  }
  Rng split_rng(derive_seed(cfg.seed, 22));
  split_rng.shuffle(std::span<TripleKey>(distinct));
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(distinct.size())));
  TripleSet held(distinct.begin(), distinct.begin() + static_cast<std::ptrdiff_t>(n_test));

  std::vector<TemporalEdge> train_edges;
  std::vector<trainset::TrainInstance> test_pos;
  TripleSet emitted;
  for (const auto& e : data.all_edges) {
    const TripleKey k = canonical(e.src, e.dst, e.etype);
    if (!held.count(k)) {
      train_edges.push_back(e);
    } else if (emitted.insert(k).second) {
      test_pos.push_back({e.src, e.dst, e.etype, 1});
    }
  }

  const Timestamp q_begin = cfg.ts_begin + cfg.ts_span;
  auto to_query = [&](const trainset::TrainInstance& t, Rng& r) {
    const Timestamp a = q_begin + static_cast<Timestamp>(r.uniform_index(static_cast<std::uint64_t>(cfg.query_span)));
    const Timestamp b = q_begin + static_cast<Timestamp>(r.uniform_index(static_cast<std::uint64_t>(cfg.query_span)));
    return ingest::Query{t.src, t.dst, t.etype, std::min(a, b), std::max(a, b), t.label};
  };

  Rng query_rng(derive_seed(cfg.seed, 23));
  if (!test_pos.empty()) {
    auto rows = test_pos;
    for (const auto& n : negatives_for(test_pos, truth, derive_seed(cfg.seed, 24))) rows.push_back(n);
    query_rng.shuffle(std::span<trainset::TrainInstance>(rows));
    for (const auto& t : rows) data.test_queries.push_back(to_query(t, query_rng));
  }

  std::vector<trainset::TrainInstance> train_pos;
  train_pos.reserve(train_edges.size());
  for (const auto& e : train_edges) train_pos.push_back({e.src, e.dst, e.etype, 1});
  for (const auto& e : train_edges) {
    data.train_queries.push_back({e.src, e.dst, e.etype, e.ts, e.ts, 1});
  }
  for (const auto& n : negatives_for(train_pos, truth, derive_seed(cfg.seed, 25))) {
    const Timestamp ts = cfg.ts_begin + static_cast<Timestamp>(query_rng.uniform_index(static_cast<std::uint64_t>(cfg.ts_span)));
    data.train_queries.push_back({n.src, n.dst, n.etype, ts, ts, 0});
  }

  data.graph = MultiGraph::build(std::move(train_edges), cfg.num_nodes, cfg.num_edge_types,
                                 Directedness::kUndirected);
  return data;
}

void write_dataset(const std::filesystem::path& dir, const SynthData& data, const SynthConfig& cfg) {
  std::filesystem::create_directories(dir);
  const IdMap ids = IdMap::identity(cfg.num_nodes);
  ingest::write_edges_csv(dir / "edges.csv", data.graph.edges(), ids, std::nullopt);
  ingest::write_queries_csv(dir / "train_queries.csv", data.train_queries);
  ingest::write_queries_csv(dir / "test.csv", data.test_queries);
}

}  // namespace tlp::synth
