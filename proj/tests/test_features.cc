#include <cmath>

#include "doctest.h"
#include "oracles.h"
#include "tlp/error.h"
#include "tlp/features.h"

using namespace tlp;
using namespace tlp::features;

namespace {

TemporalEdge E(NodeId u, NodeId v, EdgeTypeId r = 0) { return {u, v, r, 0, {}}; }

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("crossing examples") {
    const std::vector<double> a = {1, 0}, b = {0, 1}, c = {3, 4}, d = {4, 3};
    auto x = crossing_features(std::span<const double>(a), std::span<const double>(a));
    CHECK(x.cosine == 1.0);
    CHECK(x.dot == 1.0);
    x = crossing_features(std::span<const double>(a), std::span<const double>(b));
    CHECK(x.cosine == 0.0);
    CHECK(x.dot == 0.0);
    x = crossing_features(std::span<const double>(c), std::span<const double>(d));
    CHECK(x.dot == 24.0);
    CHECK(x.cosine == doctest::Approx(0.96).epsilon(1e-15));
    const std::vector<double> z = {0, 0};
    CHECK(crossing_features(std::span<const double>(z), std::span<const double>(c)).cosine == 0.0);
    const std::vector<double> three = {1, 2, 3};
    CHECK_THROWS_AS(crossing_features(std::span<const double>(a), std::span<const double>(three)), Error);
  }

  TEST_CASE("unary examples") {
    const auto g = build_graph({E(0, 1, 1), E(0, 1, 2), E(2, 3), E(3, 4), E(4, 2)}, 6, 3,
                               Directedness::kUndirected);
    CHECK(node_unary(g, 5) == NodeUnary{0, 0, 0});
    CHECK(node_unary(g, 0) == NodeUnary{2, 1, 2});
    const auto tri = node_unary(g, 2);
    CHECK(tri.degree == 2);
    CHECK(tri.distinct_neighbors == 2);
  }

  TEST_CASE("pair examples") {
    auto g = build_graph({E(0, 5)}, 6, 1, Directedness::kUndirected);
    CHECK(pair_binary(g, 1, 2) == PairBinary{0, 0, 0});
    g = build_graph({E(0, 1), E(1, 2)}, 3, 1, Directedness::kUndirected);
    CHECK(pair_binary(g, 0, 2) == PairBinary{0, 1, 0});
    // u=0, v=1, w=2: two parallel u-v edges, 2 x u-w and 3 x w-v.
    g = build_graph({E(0, 1, 0), E(0, 1, 1), E(0, 2), E(2, 0), E(2, 1), E(1, 2), E(2, 1)}, 3, 2,
                    Directedness::kUndirected);
    CHECK(pair_binary(g, 0, 1) == PairBinary{2, 6, 2});
    CHECK(pair_binary(g, 0, 1, TwoHopMode::kBinary).two_hop == 1);
  }

  TEST_CASE("triplet examples") {
    const auto g = build_graph({E(0, 1, 2), E(1, 0, 2), E(0, 1, 2), E(0, 1, 1)}, 2, 3,
                               Directedness::kUndirected);
    CHECK(triplet_count(g, 0, 1, 0) == 0);
    CHECK(triplet_count(g, 0, 1, 1) == 1);
    CHECK(triplet_count(g, 0, 1, 2) == 3);
  }

  TEST_CASE("structural features match edge-list oracles, both directednesses") {
    Rng rng(1234);
    for (int t = 0; t < 25; ++t) {
      const auto rg = oracle::random_graph(rng, 40, 200, 5);
      for (auto dir : {Directedness::kUndirected, Directedness::kDirected}) {
        const bool und = dir == Directedness::kUndirected;
        const auto g = build_graph(rg.edges, rg.num_nodes, rg.num_types, dir);
        const auto a = oracle::adjacency(rg.edges, rg.num_nodes, und);
        for (NodeId u = 0; u < rg.num_nodes; ++u) {
          const auto nu = node_unary(g, u);
          CHECK(nu.degree == oracle::degree(rg.edges, u, und));
          CHECK(nu.distinct_neighbors == oracle::distinct_neighbors(rg.edges, u, und));
          CHECK(nu.distinct_etypes == oracle::distinct_etypes(rg.edges, u, und));
          for (NodeId v = 0; v < rg.num_nodes; ++v) {
            const auto p = pair_binary(g, u, v);
            CHECK(p.one_hop == oracle::one_hop(rg.edges, u, v, und));
            CHECK(p.two_hop == oracle::two_hop(rg.edges, u, v, und, false));
            CHECK(static_cast<std::int64_t>(p.two_hop) == oracle::a2_minus_endpoints(a, u, v));
            CHECK(pair_binary(g, u, v, TwoHopMode::kBinary).two_hop == oracle::two_hop(rg.edges, u, v, und, true));
            CHECK(p.distinct_etypes_between == oracle::etypes_between(rg.edges, u, v, und));
            const auto r = static_cast<EdgeTypeId>(rng.uniform_index(rg.num_types));
            CHECK(triplet_count(g, u, v, r) == oracle::triplet(rg.edges, u, v, r, und));
            if (und) {
              CHECK(pair_binary(g, v, u) == p);
              CHECK(triplet_count(g, v, u, r) == triplet_count(g, u, v, r));
            }
          }
        }
      }
    }
  }

  TEST_CASE("excluding a positive row's own edge equals featurizing without it") {
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
      const auto rg = oracle::random_graph(rng, 30, 120, 4);
      if (rg.edges.empty()) continue;
      for (auto dir : {Directedness::kUndirected, Directedness::kDirected}) {
        const auto g = build_graph(rg.edges, rg.num_nodes, rg.num_types, dir);
        for (std::size_t i = 0; i < rg.edges.size(); i += 7) {
          const auto& e = rg.edges[i];
          auto rest = rg.edges;
          rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
          const auto h = build_graph(rest, rg.num_nodes, rg.num_types, dir);
          FeatureOptions opts;
          opts.exclude_self_edge = true;
          const auto a = featurize(g, nullptr, PairKey{e.src, e.dst, e.etype, true}, opts);
          const auto b = featurize(h, nullptr, PairKey{e.src, e.dst, e.etype, false}, {});
          CHECK(a.values() == b.values());
        }
      }
    }
  }

  TEST_CASE("fixed schema, zero embeddings and time invariance") {
    const auto g = build_graph({E(0, 1), E(1, 2)}, 4, 1, Directedness::kUndirected);
    embed::EmbeddingTable emb;
    emb.num_nodes = 4;
    emb.dim = 2;
    emb.vectors.assign(8, 0.0f);
    const ingest::Query q1{3, 0, 0, 5, 10, 1};
    ingest::Query q2 = q1;
    q2.start_ts = 900;
    q2.end_ts = 1000;
    const auto r1 = featurize(g, &emb, q1);
    CHECK(r1.values().size() == 3 + 3 + 3 + 1 + 2 + 3);
    CHECK(r1.values() == featurize(g, &emb, q2).values());
    CHECK(r1.dst.degree == 1);
    CHECK(r1.src == NodeUnary{});
    CHECK(r1.crossing.cosine == 0.0);
    CHECK(r1.crossing.dot == 0.0);
    CHECK(featurize(g, &emb, ingest::Query{0, 1, 0, 0, 0, {}}).values().size() == r1.values().size());
    CHECK(FeatureRow::column_names(0).size() == r1.values().size());
  }

  TEST_CASE("batch featurization is order-stable across thread counts") {
    Rng rng(5);
    const auto rg = oracle::random_graph(rng, 60, 300, 3);
    const auto g = build_graph(rg.edges, rg.num_nodes, rg.num_types, Directedness::kUndirected);
    std::vector<PairKey> keys;
    for (int i = 0; i < 200; ++i) {
      keys.push_back({static_cast<NodeId>(rng.uniform_index(rg.num_nodes)),
                      static_cast<NodeId>(rng.uniform_index(rg.num_nodes)), 0, false});
    }
    const auto a = featurize_all(g, nullptr, keys, {}, 1);
    const auto b = featurize_all(g, nullptr, keys, {}, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values() == b[i].values());
  }

  TEST_CASE("family toggles change only their own columns") {
    CHECK_THROWS_AS(FeatureFamilies::parse("raw,crossing").validate(), Error);
    CHECK_THROWS_AS(FeatureFamilies::parse("bogus"), Error);
    CHECK(FeatureFamilies::parse("all") == FeatureFamilies{});
    CHECK(FeatureFamilies::parse(FeatureFamilies{}.to_string()) == FeatureFamilies{});

    const auto all = column_names(FeatureFamilies{}, 1, 2);
    CHECK(all.size() == 10 + 2 + 5 + 4);
    const auto no_sub = column_names(FeatureFamilies{true, true, true, false}, 1, 2);
    std::vector<std::string> expect(all.begin() + 10, all.end());
    CHECK(no_sub == expect);
    const auto raw_only = column_names(FeatureFamilies{true, false, false, false}, 1, 2);
    CHECK(raw_only == std::vector<std::string>{"src_id", "dst_id", "etype", "src_nf_0", "dst_nf_0"});
  }

  TEST_CASE("assembled matrix matches the row values") {
    const auto g = build_graph({E(0, 1), E(1, 2)}, 3, 1, Directedness::kUndirected);
    embed::EmbeddingTable emb;
    emb.num_nodes = 3;
    emb.dim = 2;
    emb.vectors = {1, 0, 0, 1, 1, 1};
    const std::vector<PairKey> keys = {{0, 2, 0, false}, {1, 2, 0, true}};
    const auto rows = featurize_all(g, &emb, keys, {});
    const auto m = assemble(rows, &emb, FeatureFamilies{}, 0, {0, 1});
    CHECK(m.rows == 2);
    CHECK(m.cols() == 10 + 2 + 3 + 4);
    CHECK(m.at(0, 7) == 1.0);                  // two_hop via node 1
    CHECK(m.at(0, 11) == doctest::Approx(1.0));  // dot of (1,0) and (1,1)
    CHECK(m.at(1, 15) == 0.0);                 // src_emb_0 of node 1
    CHECK(m.at(1, 18) == 1.0);                 // dst_emb_1 of node 2
    CHECK(m.labels == std::vector<int>{0, 1});
    CHECK_THROWS_AS(assemble(rows, nullptr, FeatureFamilies{}, 0), Error);
  }

  TEST_CASE("feature csv round-trips bit-exactly") {
    oracle::TempDir d("feat_csv");
    FeatureMatrix m;
    m.names = {"a", "b"};
    m.rows = 2;
    m.values = {0.1, 1.0 / 3.0, -2.5e-300, 7};
    m.labels = {1, 0};
    write_feature_csv(d / "f.csv", m);
    const auto back = read_feature_csv(d / "f.csv");
    CHECK(back.names == m.names);
    CHECK(back.values == m.values);
    CHECK(back.labels == m.labels);
  }
}
