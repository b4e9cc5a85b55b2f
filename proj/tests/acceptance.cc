// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.h"
#include "tlp/analysis.h"
#include "tlp/csv.h"
#include "tlp/error.h"
#include "tlp/features.h"
#include "tlp/gbdt.h"
#include "tlp/graph_io.h"
#include "tlp/line.h"
#include "tlp/metrics.h"
#include "tlp/pipeline.h"
#include "tlp/synth.h"
#include "tlp/trainset.h"

using namespace tlp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 10) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<void(Check&)> body;
};

// ---------------------------------------------------------------- C1

void feature_oracles(Check& c) {
  Rng rng(1001);
  std::size_t pairs = 0;
  for (int t = 0; t < 50; ++t) {
    const auto rg = oracle::random_graph(rng, 100, 500, 8);
    for (auto dir : {Directedness::kUndirected, Directedness::kDirected}) {
      const bool und = dir == Directedness::kUndirected;
      const auto g = build_graph(rg.edges, rg.num_nodes, rg.num_types, dir);
      const auto a = oracle::adjacency(rg.edges, rg.num_nodes, und);
      const std::string tag = "graph " + std::to_string(t) + (und ? " undirected" : " directed");
      for (NodeId u = 0; u < rg.num_nodes; ++u) {
        const auto nu = features::node_unary(g, u);
        c.expect(nu.degree == oracle::degree(rg.edges, u, und), tag + ": degree");
        c.expect(nu.distinct_neighbors == oracle::distinct_neighbors(rg.edges, u, und),
                 tag + ": distinct_neighbors");
        c.expect(nu.distinct_etypes == oracle::distinct_etypes(rg.edges, u, und),
                 tag + ": distinct_etypes");
        for (NodeId v = 0; v < rg.num_nodes; ++v) {
          ++pairs;
          const auto p = features::pair_binary(g, u, v);
          c.expect(p.one_hop == oracle::one_hop(rg.edges, u, v, und), tag + ": one_hop");
          c.expect(p.distinct_etypes_between == oracle::etypes_between(rg.edges, u, v, und),
                   tag + ": distinct_etypes_between");
          c.expect(p.two_hop == oracle::two_hop(rg.edges, u, v, und, false), tag + ": two_hop");
          c.expect(static_cast<std::int64_t>(p.two_hop) == oracle::a2_minus_endpoints(a, u, v),
                   tag + ": two_hop vs A^2");
          c.expect(features::pair_binary(g, u, v, features::TwoHopMode::kBinary).two_hop ==
                       oracle::two_hop(rg.edges, u, v, und, true),
                   tag + ": binary two_hop");
          for (EdgeTypeId r = 0; r < rg.num_types; ++r) {
            c.expect(features::triplet_count(g, u, v, r) == oracle::triplet(rg.edges, u, v, r, und),
                     tag + ": triplet");
          }
        }
      }
    }
  }
  c.note(std::to_string(pairs) + " node pairs");
}

// ---------------------------------------------------------------- C2

void auc_oracle(Check& c) {
  Rng rng(2002);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.uniform_index(199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    // A small score alphabet on a third of the instances forces many ties.
    const std::size_t levels = t % 3 == 0 ? 1 + rng.uniform_index(5) : 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = levels ? static_cast<double>(rng.uniform_index(levels)) : rng.uniform01();
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    const double got = eval::auc(s, y).auc;
    const double want = oracle::pairwise_auc(s, y);
    worst = std::max(worst, std::abs(got - want));
    c.expect(std::abs(got - want) <= 1e-12, "instance " + std::to_string(t));
  }
  c.note("max |diff| " + fmt(worst));
}

// ---------------------------------------------------------------- C3

void tscore_exact(Check& c) {
  Rng rng(3003);
  // Symmetric pairs m +- s with dyadic m and s make the mean and the
  // population std exact in binary floating point.
  for (int t = 0; t < 100; ++t) {
    const double m = static_cast<double>(300 + rng.uniform_index(400)) / 1024.0;
    const double s = static_cast<double>(1 + rng.uniform_index(250)) / 1024.0;
    const std::size_t pairs = std::size_t{1} << rng.uniform_index(4);
    std::vector<double> all;
    for (std::size_t i = 0; i < pairs; ++i) {
      all.push_back(m - s);
      all.push_back(m + s);
    }
    c.expect(eval::tscore({m + s, all}) == 0.6, "tscore(mean+std) instance " + std::to_string(t));
    // A participant sitting exactly at the mean keeps the mean at m.
    all.push_back(m);
    c.expect(eval::tscore({m, all}) == 0.5, "tscore(mean) instance " + std::to_string(t));
  }

  // Average of two per-dataset T-scores against an independent computation.
  auto ref_t = [](double self, const std::vector<double>& all) {
    long double mean = 0;
    for (double a : all) mean += a;
    mean /= static_cast<long double>(all.size());
    long double var = 0;
    for (double a : all) var += (a - mean) * (a - mean);
    var /= static_cast<long double>(all.size());
    return static_cast<double>((self - mean) / std::sqrt(var) * 0.1L + 0.5L);
  };
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a_all, b_all;
    const std::size_t n = 3 + rng.uniform_index(30);
    for (std::size_t i = 0; i < n; ++i) {
      a_all.push_back(0.5 + 0.3 * rng.uniform01());
      b_all.push_back(0.6 + 0.35 * rng.uniform01());
    }
    const std::size_t me = rng.uniform_index(n);
    const double ta = eval::tscore({a_all[me], a_all});
    const double tb = eval::tscore({b_all[me], b_all});
    const double got = eval::average_tscore(ta, tb);
    const double want = (ref_t(a_all[me], a_all) + ref_t(b_all[me], b_all)) / 2.0;
    worst = std::max(worst, std::abs(got - want));
    c.expect(std::abs(got - want) <= 1e-12, "average pair " + std::to_string(t));
  }
  c.note("average_tscore max |diff| " + fmt(worst));
}

// ---------------------------------------------------------------- C4

void line_gradients(Check& c) {
  Rng rng(4004);
  double worst = 0.0;
  auto vec = [&rng](std::size_t d) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.uniform01() * 2.0 - 1.0;
    return v;
  };
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = 1 + rng.uniform_index(8);
    const std::size_t k = rng.uniform_index(4);
    auto u = vec(dim), v = vec(dim);
    std::vector<std::vector<double>> negs;
    for (std::size_t i = 0; i < k; ++i) negs.push_back(vec(dim));
    const auto g = embed::line_gradients(u, v, negs);
    const double h = 1e-5;
    auto fd = [&](std::vector<double>& x, std::size_t i) {
      const double keep = x[i];
      x[i] = keep + h;
      const double up = embed::line_objective(u, v, negs);
      x[i] = keep - h;
      const double down = embed::line_objective(u, v, negs);
      x[i] = keep;
      return (up - down) / (2.0 * h);
    };
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
    };
    for (std::size_t i = 0; i < dim; ++i) {
      double e = rel(g.source[i], fd(u, i));
      e = std::max(e, rel(g.target[i], fd(v, i)));
      for (std::size_t j = 0; j < k; ++j) e = std::max(e, rel(g.negatives[j][i], fd(negs[j], i)));
      worst = std::max(worst, e);
      c.expect(e <= 1e-5, "instance " + std::to_string(t));
    }
  }
  c.note("max relative error " + fmt(worst));
}

// ---------------------------------------------------------------- C5

double clique_gap(const embed::EmbeddingTable& t, std::size_t size) {
  double within = 0, cross = 0;
  std::size_t nw = 0, nc = 0;
  for (NodeId a = 0; a < t.num_nodes; ++a) {
    for (NodeId b = a + 1; b < t.num_nodes; ++b) {
      const double cs = oracle::cosine(t.row(a), t.row(b));
      if (a / size == b / size) {
        within += cs;
        ++nw;
      } else {
        cross += cs;
        ++nc;
      }
    }
  }
  return within / static_cast<double>(nw) - cross / static_cast<double>(nc);
}

void embedding_separation(Check& c) {
  const std::size_t size = 50;
  std::vector<TemporalEdge> edges;
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t a = 0; a < size; ++a) {
      for (std::size_t b = a + 1; b < size; ++b) {
        edges.push_back({static_cast<NodeId>(k * size + a), static_cast<NodeId>(k * size + b), 0, 0, {}});
      }
    }
  }
  const auto g = build_graph(edges, 2 * size, 1, Directedness::kUndirected);
  for (auto order : {embed::LineOrder::kFirst, embed::LineOrder::kSecond}) {
    embed::LineConfig cfg;  // defaults, seed 42
    cfg.order = order;
    const auto t = embed::train_line(g, cfg);
    const double gap = clique_gap(t, size);
    c.note(embed::to_string(order) + " gap " + fmt(gap));
    c.expect(gap >= 0.2, embed::to_string(order) + " order gap " + fmt(gap) + " < 0.2");
  }
}

// ---------------------------------------------------------------- C6

void sampling_contracts(Check& c) {
  Rng rng(6006);
  for (int t = 0; t < 20; ++t) {
    auto rg = oracle::random_graph(rng, 80, 400, 5);
    if (rg.edges.size() < 2) {
      rg.edges.push_back({0, 0, 0, 0, {}});
      rg.edges.push_back({0, 0, 0, 1, {}});
    }
    const auto g = build_graph(rg.edges, rg.num_nodes, rg.num_types, Directedness::kUndirected);
    const std::string tag = "graph " + std::to_string(t);
    for (auto mode : {trainset::ShuffleMode::kJoint, trainset::ShuffleMode::kIndependent}) {
      trainset::SamplerConfig cfg;
      cfg.seed = 600 + static_cast<std::uint64_t>(t);
      cfg.neg_ratio = 1.0;
      cfg.shuffle = mode;
      const auto pos = trainset::positives_of(g);
      const auto neg = trainset::shuffle_negatives(pos, cfg);
      std::multiset<NodeId> ps, ns;
      for (const auto& p : pos) ps.insert(p.src);
      for (const auto& n : neg) ns.insert(n.src);
      c.expect(ps == ns, tag + ": negative source multiset");

      const auto set = trainset::assemble_train_set(g, cfg);
      std::map<std::tuple<NodeId, NodeId, EdgeTypeId>, int> seen;
      for (const auto& r : set.instances) {
        const auto key = std::make_tuple(std::min(r.src, r.dst), std::max(r.src, r.dst), r.etype);
        seen[key] |= 1 << r.label;
      }
      for (const auto& [k, bits] : seen) c.expect(bits != 3, tag + ": key with both labels");
      c.expect(set.raw_negatives - set.collisions == set.num_negatives,
               tag + ": collision accounting");
      c.expect(trainset::assemble_train_set(g, cfg).instances == set.instances,
               tag + ": determinism");
    }
  }
}

// ---------------------------------------------------------------- C7

FeatureMatrix one_col_matrix(std::vector<std::string> names, std::vector<double> v) {
  FeatureMatrix m;
  m.names = std::move(names);
  m.rows = v.size() / m.names.size();
  m.values = std::move(v);
  return m;
}

double train_accuracy(const gbdt::GbdtModel& model, const FeatureMatrix& x, const std::vector<int>& y) {
  const auto p = model.predict_proba(x);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += (p[i] >= 0.5) == (y[i] == 1);
  return static_cast<double>(ok) / static_cast<double>(y.size());
}

void gbdt_oracles(Check& c) {
  Rng rng(7007);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.uniform_index(120);
    const std::size_t nb = 1 + rng.uniform_index(t % 4 ? 16 : 256);
    std::vector<std::uint8_t> bins(n);
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      bins[i] = static_cast<std::uint8_t>(rng.uniform_index(nb));
      g[i] = rng.uniform01() * 2.0 - 1.0;
      h[i] = 0.01 + rng.uniform01() * 0.25;
    }
    const std::size_t min_leaf = 1 + rng.uniform_index(8);
    const double l2 = t % 2 ? 1.0 : 0.0;
    const auto got = gbdt::best_split(bins, g, h, min_leaf, l2);
    const auto want = oracle::exhaustive_split(bins, g, h, min_leaf, l2, gbdt::kMinSplitGain);
    const std::string tag = "column " + std::to_string(t);
    c.expect(got.has_value() == want.found, tag + ": split presence");
    if (got && want.found) {
      c.expect(std::abs(got->gain - want.gain) <= 1e-9 * std::max(1.0, want.gain), tag + ": gain");
      // Same left partition: no row has a bin in (got, want] or (want, got].
      const auto lo = std::min(got->threshold_bin, want.bin), hi = std::max(got->threshold_bin, want.bin);
      bool same = true;
      for (auto b : bins) same &= !(b > lo && b <= hi);
      c.expect(same, tag + ": partition");
    }
  }

  // XOR with uneven cell counts so the root split has positive gain.
  std::vector<double> xv;
  std::vector<int> xy;
  const int counts[4] = {20, 24, 28, 32};
  for (int cell = 0; cell < 4; ++cell) {
    for (int k = 0; k < counts[cell]; ++k) {
      xv.push_back(cell & 1);
      xv.push_back((cell >> 1) & 1);
      xy.push_back((cell & 1) ^ ((cell >> 1) & 1));
    }
  }
  const auto xor_x = one_col_matrix({"a", "b"}, xv);
  gbdt::GbdtConfig xc;
  xc.num_trees = 50;
  xc.min_samples_leaf = 1;
  xc.max_depth = 2;
  const double acc2 = train_accuracy(gbdt::fit(xor_x, xy, xc), xor_x, xy);
  xc.max_depth = 1;
  const double acc1 = train_accuracy(gbdt::fit(xor_x, xy, xc), xor_x, xy);
  c.note("xor depth2 " + fmt(acc2) + " depth1 " + fmt(acc1));
  c.expect(acc2 == 1.0, "xor depth 2 accuracy " + fmt(acc2));
  c.expect(acc1 <= 0.75, "xor depth 1 accuracy " + fmt(acc1));

  // Corpus of training sets for the monotone-loss check.
  struct Dataset {
    std::string name;
    FeatureMatrix x;
    std::vector<int> y;
  };
  std::vector<Dataset> corpus;
  corpus.push_back({"xor", xor_x, xy});
  {
    std::vector<double> v;
    std::vector<int> y;
    for (int i = -50; i < 50; ++i) {
      v.push_back(i);
      y.push_back(i >= 0);
    }
    corpus.push_back({"separable", one_col_matrix({"x"}, v), y});
  }
  for (int k = 0; k < 6; ++k) {
    const std::size_t n = 100 + rng.uniform_index(900), f = 1 + rng.uniform_index(6);
    std::vector<double> v(n * f);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < f; ++j) v[i * f + j] = k % 2 ? std::floor(rng.uniform01() * 5) : rng.uniform01();
      y[i] = rng.bernoulli(0.2 + 0.6 * v[i * f] / (k % 2 ? 5.0 : 1.0)) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    corpus.push_back({"noisy" + std::to_string(k), one_col_matrix(std::vector<std::string>(f, "c"), v), y});
  }
  corpus.push_back({"all_positive", one_col_matrix({"x"}, {1, 2, 3, 4, 5}), {1, 1, 1, 1, 1}});
  corpus.push_back({"duplicates", one_col_matrix({"x"}, std::vector<double>(40, 1.0)),
                    std::vector<int>(20, 1)});
  corpus.back().y.resize(40, 0);
  {
    synth::SynthConfig sc;
    sc.num_nodes = 300;
    sc.num_communities = 6;
    sc.num_edges_target = 5000;
    sc.intra_edge_prob = 0.4;
    sc.inter_edge_prob = 0.01;
    const auto d = synth::generate(sc);
    std::vector<features::PairKey> keys;
    std::vector<int> y;
    for (const auto& q : d.train_queries) {
      keys.push_back({q.src, q.dst, q.etype, *q.label == 1});
      y.push_back(*q.label);
    }
    features::FeatureOptions fo;
    fo.exclude_self_edge = true;
    const auto rows = features::featurize_all(d.graph, nullptr, keys, fo);
    features::FeatureFamilies fam;
    fam.line = false;
    fam.crossing = false;
    corpus.push_back({"synthetic", features::assemble(rows, nullptr, fam, 0, y), y});
  }

  for (const auto& ds : corpus) {
    for (int variant = 0; variant < 3; ++variant) {
      gbdt::GbdtConfig cfg;
      cfg.num_trees = 60;
      cfg.min_samples_leaf = variant == 0 ? 20 : 1;
      cfg.learning_rate = variant == 2 ? 1.0 : 0.1;
      cfg.subsample = variant == 1 ? 0.7 : 1.0;
      gbdt::FitTrace trace;
      gbdt::fit(ds.x, ds.y, cfg, &trace);
      bool mono = trace.train_logloss.size() == cfg.num_trees + 1;
      for (std::size_t i = 1; i < trace.train_logloss.size(); ++i) {
        mono &= trace.train_logloss[i] <= trace.train_logloss[i - 1];
      }
      c.expect(mono, ds.name + " variant " + std::to_string(variant) + ": logloss increased");
    }
  }
  c.note(std::to_string(corpus.size()) + " corpus datasets");
}

// ---------------------------------------------------------------- C8, C9

pipeline::PipelineConfig synth_defaults(const std::filesystem::path& workdir) {
  KvConfig kv;
  kv.set("workdir", workdir.string());
  kv.set("synth", "true");
  kv.set("seed", "42");
  kv.set("threads", "1");
  kv.set("line.dim", "16");
  kv.set("line.epochs", "20");
  kv.set("gbdt.num_trees", "200");
  return pipeline::PipelineConfig::from_kv(kv);
}

struct EndToEnd {
  oracle::TempDir dir{"acceptance_e2e"};
  std::optional<pipeline::RunManifest> manifest;
};

EndToEnd& e2e() {
  static EndToEnd state;
  return state;
}

void end_to_end(Check& c) {
  auto& st = e2e();
  const auto t0 = Clock::now();
  const auto m = pipeline::run_pipeline(synth_defaults(st.dir.path()), pipeline::parse_stages("all"));
  const double run_s = seconds_since(t0);
  st.manifest = m;
  const auto t1 = Clock::now();
  const auto table = pipeline::ablate(synth_defaults(st.dir.path()));
  const double abl_s = seconds_since(t1);

  double raw = -1, all = -1;
  for (const auto& r : table.rows) {
    if (r.name == "raw") raw = r.auc;
    if (r.name == "all") all = r.auc;
  }
  const double final_auc = m.final_auc.value_or(0.0);
  c.note("pipeline auc " + fmt(final_auc) + " in " + fmt(run_s) + " s");
  c.note("ablation all " + fmt(all) + " raw " + fmt(raw) + " naive " + fmt(table.naive_auc) +
         " naive_etype " + fmt(table.naive_auc_etype) + " in " + fmt(abl_s) + " s");
  c.expect(final_auc >= 0.85, "pipeline auc " + fmt(final_auc));
  c.expect(table.naive_auc > 0.5, "naive auc not above chance");
  c.expect(final_auc > table.naive_auc, "pipeline auc not above naive");
  c.expect(all >= raw + 0.05, "all < raw + 0.05");
  c.expect(all >= table.naive_auc && all >= table.naive_auc_etype, "all < naive");
  c.expect(run_s < 300.0, "pipeline runtime " + fmt(run_s) + " s");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Check& c) {
  auto& st = e2e();
  if (!st.manifest) {
    st.manifest = pipeline::run_pipeline(synth_defaults(st.dir.path()), pipeline::parse_stages("all"));
  }
  oracle::TempDir again("acceptance_replay");
  const auto loaded = pipeline::RunManifest::load(pipeline::Artifacts{st.dir.path()}.manifest());
  const auto r = pipeline::replay(loaded, again.path());
  c.expect(r.stages.size() == st.manifest->stages.size(), "stage count");
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(st.dir.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), st.dir.path());
    if (rel == "manifest.json") continue;  // holds wall-clock timings
    const auto other = again.path() / rel;
    c.expect(std::filesystem::exists(other), rel.string() + " missing from replay");
    if (std::filesystem::exists(other)) {
      c.expect(slurp(entry.path()) == slurp(other), rel.string() + " differs");
      ++compared;
    }
  }
  for (std::size_t i = 0; i < std::min(r.stages.size(), st.manifest->stages.size()); ++i) {
    c.expect(r.stages[i].outputs == st.manifest->stages[i].outputs,
             pipeline::to_string(r.stages[i].stage) + " checksums");
  }
  c.expect(r.final_auc == st.manifest->final_auc, "final auc");
  c.note(std::to_string(compared) + " artifacts identical");
}

// ---------------------------------------------------------------- C10

// Parses the existence rows of analysis.txt: name, total, then
// "count (pct%)" cells.
std::map<std::string, analysis::ExistenceReport> parse_existence(const std::string& text) {
  std::map<std::string, analysis::ExistenceReport> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (name != "with" && name != "without") continue;
    analysis::ExistenceReport r;
    r.with_etype = name == "with";
    std::size_t* cells[] = {&r.exist_in_graph, &r.exist_label1, &r.exist_label0,
                            &r.notexist_label1, &r.notexist_label0};
    std::string pct;
    ls >> r.total;
    for (auto* cell : cells) ls >> *cell >> pct;
    if (ls) out[name] = r;
  }
  return out;
}

void format_fidelity(Check& c) {
  oracle::TempDir dir("acceptance_fixture");
  // 250 pairs (1000 + i, 2000 + i), each with four parallel edges of type
  // i mod 5: 1000 edges.
  {
    std::ofstream e(dir / "edges.csv");
    for (int i = 0; i < 250; ++i) {
      for (int k = 0; k < 4; ++k) {
        e << 1000 + i << ',' << 2000 + i << ',' << i % 5 << ',' << 1600000000 + 60 * (4 * i + k) << '\n';
      }
    }
  }
  {
    std::ofstream q(dir / "test.csv");
    auto row = [&q](long s, long d, int r, int label) {
      q << s << ',' << d << ',' << r << ",1700000000,1700086400," << label << '\n';
    };
    // G1: pair and type present; 30 positives, 30 negatives.
    for (int i = 0; i < 60; ++i) row(1000 + i, 2000 + i, i % 5, i % 2 == 0);
    // G2: pair present, wrong type; 10 positives, 30 negatives.
    for (int i = 60; i < 100; ++i) row(1000 + i, 2000 + i, (i + 1) % 5, i % 4 == 0);
    // G3: reversed pair and type present (undirected); 20 positives, 30 negatives.
    for (int i = 100; i < 150; ++i) row(2000 + i, 1000 + i, i % 5, i < 120);
    // G4: known nodes, absent pair; 15 positives, 55 negatives.
    for (int i = 150; i < 220; ++i) row(1000 + i, 2001 + i, i % 5, i < 165);
    // G5: unseen raw ids; 5 positives, 5 negatives.
    for (int i = 0; i < 10; ++i) row(9000 + i, 2000 + i, 0, i < 5);
  }
  KvConfig kv;
  kv.set("workdir", (dir / "work").string());
  kv.set("edges", (dir / "edges.csv").string());
  kv.set("test", (dir / "test.csv").string());
  pipeline::run_pipeline(pipeline::PipelineConfig::from_kv(kv),
                         {pipeline::Stage::kIngest, pipeline::Stage::kAnalyze});

  const auto bundle = load_graph(pipeline::Artifacts{dir / "work"}.graph());
  c.expect(bundle.graph.num_edges() == 1000, "edge count");
  c.expect(bundle.ids.size() == 500, "node count");

  const auto reports = parse_existence(slurp(pipeline::Artifacts{dir / "work"}.analysis()));
  // Without type: exist = G1 + G2 + G3.
  analysis::ExistenceReport without;
  without.total = 230;
  without.exist_in_graph = 60 + 40 + 50;
  without.exist_label1 = 30 + 10 + 20;
  without.exist_label0 = 30 + 30 + 30;
  without.notexist_label1 = 15 + 5;
  without.notexist_label0 = 55 + 5;
  // With type: G2 moves to the not-exist side.
  analysis::ExistenceReport with;
  with.with_etype = true;
  with.total = 230;
  with.exist_in_graph = 60 + 50;
  with.exist_label1 = 30 + 20;
  with.exist_label0 = 30 + 30;
  with.notexist_label1 = 10 + 15 + 5;
  with.notexist_label0 = 30 + 55 + 5;
  c.expect(reports.count("without") && reports.at("without") == without, "without-type counts");
  c.expect(reports.count("with") && reports.at("with") == with, "with-type counts");
  if (reports.count("with") && reports.count("without")) {
    const auto& w = reports.at("with");
    const auto& wo = reports.at("without");
    c.expect(w.exist_in_graph <= wo.exist_in_graph, "existence monotonicity");
    c.expect(w.exist_label1 <= wo.exist_label1, "label-1 monotonicity");
    c.expect(w.exist_label0 <= wo.exist_label0, "label-0 monotonicity");
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "feature-oracle equivalence", 10.0, feature_oracles},
      {2, "AUC oracle", 5.0, auc_oracle},
      {3, "T-score exactness", 0.0, tscore_exact},
      {4, "LINE gradient check", 5.0, line_gradients},
      {5, "embedding separation", 30.0, embedding_separation},
      {6, "negative-sampling contracts", 0.0, sampling_contracts},
      {7, "GBDT oracles", 60.0, gbdt_oracles},
      {8, "end-to-end synthetic", 0.0, end_to_end},
      {9, "determinism", 0.0, determinism},
      {10, "format fidelity", 0.0, format_fidelity},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = Clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double s = seconds_since(t0);
    if (cr.time_limit_s > 0 && s >= cr.time_limit_s) {
      c.failures.push_back("runtime " + fmt(s) + " s over " + fmt(cr.time_limit_s) + " s");
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::printf("%s C%d %s (%.2f s)", ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), s);
    for (const auto& n : c.notes) std::printf("; %s", n.c_str());
    std::printf("\n");
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
