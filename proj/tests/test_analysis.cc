#include "doctest.h"
#include "oracles.h"
#include "tlp/analysis.h"
#include "tlp/error.h"

using namespace tlp;
using namespace tlp::analysis;
using ingest::Query;

namespace {

MultiGraph one_edge() { return build_graph({{1, 2, 1, 0, {}}}, 4, 3, Directedness::kUndirected); }

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("existence ignores type unless asked") {
    const auto g = one_edge();
    const std::vector<Query> q = {{1, 2, 2, 0, 0, 1}};
    const auto a = existence_report(g, q, false);
    CHECK(a.exist_label1 == 1);
    CHECK(a.exist_in_graph == 1);
    const auto b = existence_report(g, q, true);
    CHECK(b.notexist_label1 == 1);
    CHECK(b.exist_in_graph == 0);
  }

  TEST_CASE("existence rejects unlabeled queries") {
    const std::vector<Query> q = {{1, 2, 2, 0, 0, std::nullopt}};
    CHECK_THROWS_AS(existence_report(one_edge(), q, false), Error);
  }

  TEST_CASE("naive predictor") {
    const auto g = one_edge();
    const std::vector<Query> q = {{1, 2, 1, 0, 0, {}}, {1, 3, 1, 0, 0, {}}, {2, 1, 1, 0, 0, {}}};
    CHECK(naive_predict(g, q, true) == std::vector<double>{1.0, 0.0, 1.0});
  }

  TEST_CASE("report identities, type monotonicity and time invariance on random data") {
    Rng rng(17);
    for (int t = 0; t < 30; ++t) {
      const auto rg = oracle::random_graph(rng, 40, 120, 4);
      const auto g = build_graph(rg.edges, rg.num_nodes, rg.num_types, Directedness::kUndirected);
      std::vector<Query> qs;
      for (int i = 0; i < 60; ++i) {
        qs.push_back({static_cast<NodeId>(rng.uniform_index(rg.num_nodes)),
                      static_cast<NodeId>(rng.uniform_index(rg.num_nodes)),
                      static_cast<EdgeTypeId>(rng.uniform_index(rg.num_types)), 0, 10,
                      static_cast<int>(rng.uniform_index(2))});
      }
      const auto a = existence_report(g, qs, false);
      const auto b = existence_report(g, qs, true);
      for (const auto& r : {a, b}) {
        CHECK(r.exist_label1 + r.exist_label0 == r.exist_in_graph);
        CHECK(r.exist_in_graph + r.notexist_label1 + r.notexist_label0 == r.total);
      }
      CHECK(b.exist_in_graph <= a.exist_in_graph);
      CHECK(b.exist_label1 <= a.exist_label1);
      CHECK(b.exist_label0 <= a.exist_label0);

      auto shifted = qs;
      for (auto& q : shifted) {
        q.start_ts = static_cast<Timestamp>(rng.uniform_index(100));
        q.end_ts = q.start_ts + 5;
      }
      CHECK(naive_predict(g, qs, true) == naive_predict(g, shifted, true));
    }
  }

  TEST_CASE("aggregate mean, mode and tie rule") {
    const std::vector<LabeledKey> pool = {{1, 2, 0, 1}, {1, 2, 0, 1}, {1, 2, 0, 0}, {3, 4, 0, 1}, {3, 4, 0, 0}};
    const std::vector<Query> q = {{1, 2, 0, 0, 0, 1}, {3, 4, 0, 0, 0, 0}, {5, 6, 0, 0, 0, 0}};
    const auto mean = aggregate_predictions(pool, q, AggregateStat::kMean, false);
    CHECK(mean[0] == doctest::Approx(2.0 / 3.0));
    const auto mode = aggregate_predictions(pool, q, AggregateStat::kMode, false);
    CHECK(mode[0] == 1.0);
    CHECK(mode[1] == 1.0);
    CHECK(mode[2] == 0.5);
  }

  TEST_CASE("mean bound is perfect when every key has a single label") {
    std::vector<Query> q;
    for (NodeId k = 0; k < 10; ++k) {
      for (int rep = 0; rep < 3; ++rep) q.push_back({k, k + 1, 0, 0, 0, static_cast<int>(k % 2)});
    }
    CHECK(label_aggregate_bound(to_labeled_keys(q), q, AggregateStat::kMean, true).auc == 1.0);
    CHECK(label_aggregate_bound_in_sample(q, AggregateStat::kMean, true, false).auc == 1.0);
  }

  TEST_CASE("leave-self-out removes the query's own label") {
    const std::vector<Query> q = {{1, 2, 0, 0, 0, 1}, {1, 2, 0, 0, 0, 0}, {1, 2, 0, 0, 0, 0}};
    const auto in = aggregate_predictions_in_sample(q, AggregateStat::kMean, false, false);
    const auto out = aggregate_predictions_in_sample(q, AggregateStat::kMean, false, true);
    CHECK(in[0] == doctest::Approx(1.0 / 3.0));
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.5);
  }

  TEST_CASE("bound rejects empty query list") {
    CHECK_THROWS_AS(label_aggregate_bound({}, {}, AggregateStat::kMode, false), Error);
  }

  TEST_CASE("report formatting") {
    ExistenceReport r{10, 4, 3, 1, 2, 4, false};
    const auto text = format_existence(std::span<const ExistenceReport>(&r, 1), true);
    CHECK(text.find("10") != std::string::npos);
    CHECK(text.find(',') != std::string::npos);
  }
}
