#include "tlp/pipeline.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tlp/analysis.h"
#include "tlp/csv.h"
#include "tlp/error.h"
#include "tlp/feature_matrix.h"
#include "tlp/graph_io.h"
#include "tlp/metrics.h"

namespace tlp::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Stage s) {
  switch (s) {
    case Stage::kIngest: return "ingest";
    case Stage::kAnalyze: return "analyze";
    case Stage::kBuildTrain: return "build-train";
    case Stage::kEmbed: return "embed";
    case Stage::kFeaturize: return "featurize";
    case Stage::kTrain: return "train";
    case Stage::kPredict: return "predict";
    case Stage::kEval: return "eval";
  }
  return "?";
}

Stage parse_stage(const std::string& s) {
  for (Stage st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  throw Error("unknown stage '" + s + "'");
}

std::vector<Stage> parse_stages(const std::string& s) {
  if (s == "all") return {std::begin(kAllStages), std::end(kAllStages)};
  std::set<Stage> picked;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = csv::trim(item);
    if (!t.empty()) picked.insert(parse_stage(std::string(t)));
  }
  if (picked.empty()) throw Error("no stages given");
  return {picked.begin(), picked.end()};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "workdir", "kind", "edges", "test", "node_features", "layout", "test_labeled", "synth",
      "seed", "threads",
      "neg_ratio", "sample_size", "shuffle",
      "line.dim", "line.order", "line.epochs", "line.neg_k", "line.lr",
      "gbdt.num_trees", "gbdt.max_depth", "gbdt.learning_rate", "gbdt.min_samples_leaf",
      "gbdt.max_bins", "gbdt.subsample", "gbdt.l2",
      "features", "two_hop", "exclude_self_edge",
      "synth.num_nodes", "synth.num_communities", "synth.num_edge_types", "synth.intra_edge_prob",
      "synth.inter_edge_prob", "synth.type_affinity", "synth.num_edges_target",
      "synth.test_fraction", "synth.multiplicity_cap"};
  return keys;
}

PipelineConfig PipelineConfig::from_kv(const KvConfig& kv) {
  const auto& keys = config_keys();
  for (const auto& [k, v] : kv.values()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw Error("unknown config key '" + k + "'");
  }
  PipelineConfig c;
  auto size = [&kv](const std::string& key, std::size_t fallback) {
    const auto v = kv.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw Error("config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
  };
  c.workdir = kv.get_string("workdir", c.workdir.string());
  c.kind = ingest::parse_kind(kv.get_string("kind", ingest::to_string(c.kind)));
  c.edges = kv.get_string("edges", "");
  c.test = kv.get_string("test", "");
  c.node_features = kv.get_string("node_features", "");
  c.layout = kv.get_string("layout", "");
  c.test_labeled = kv.get_bool("test_labeled", c.test_labeled);
  c.use_synth = kv.get_bool("synth", c.use_synth);
  c.seed = kv.get_u64("seed", c.seed);
  c.threads = size("threads", c.threads);

  c.sampler.neg_ratio = kv.get_double("neg_ratio", c.sampler.neg_ratio);
  if (kv.contains("sample_size")) c.sampler.sample_size = size("sample_size", 0);
  const std::string shuffle = kv.get_string("shuffle", "joint");
  if (shuffle == "joint") {
    c.sampler.shuffle = trainset::ShuffleMode::kJoint;
  } else if (shuffle == "independent") {
    c.sampler.shuffle = trainset::ShuffleMode::kIndependent;
  } else {
    throw Error("shuffle must be 'joint' or 'independent'");
  }

  c.line.dim = size("line.dim", c.line.dim);
  c.line.order = embed::parse_order(kv.get_string("line.order", embed::to_string(c.line.order)));
  c.line.epochs = kv.get_double("line.epochs", c.line.epochs);
  c.line.neg_k = size("line.neg_k", c.line.neg_k);
  c.line.lr_init = kv.get_double("line.lr", c.line.lr_init);

  c.gbdt.num_trees = size("gbdt.num_trees", c.gbdt.num_trees);
  c.gbdt.max_depth = size("gbdt.max_depth", c.gbdt.max_depth);
  c.gbdt.learning_rate = kv.get_double("gbdt.learning_rate", c.gbdt.learning_rate);
  c.gbdt.min_samples_leaf = size("gbdt.min_samples_leaf", c.gbdt.min_samples_leaf);
  c.gbdt.max_bins = size("gbdt.max_bins", c.gbdt.max_bins);
  c.gbdt.subsample = kv.get_double("gbdt.subsample", c.gbdt.subsample);
  c.gbdt.l2 = kv.get_double("gbdt.l2", c.gbdt.l2);

  c.families = features::FeatureFamilies::parse(kv.get_string("features", "all"));
  const std::string two_hop = kv.get_string("two_hop", "multiplicity");
  if (two_hop == "multiplicity") {
    c.feature_opts.two_hop = features::TwoHopMode::kMultiplicity;
  } else if (two_hop == "binary") {
    c.feature_opts.two_hop = features::TwoHopMode::kBinary;
  } else {
    throw Error("two_hop must be 'multiplicity' or 'binary'");
  }
  c.feature_opts.exclude_self_edge = kv.get_bool("exclude_self_edge", c.feature_opts.exclude_self_edge);

  c.synth.num_nodes = size("synth.num_nodes", c.synth.num_nodes);
  c.synth.num_communities = size("synth.num_communities", c.synth.num_communities);
  c.synth.num_edge_types = size("synth.num_edge_types", c.synth.num_edge_types);
  c.synth.intra_edge_prob = kv.get_double("synth.intra_edge_prob", c.synth.intra_edge_prob);
  c.synth.inter_edge_prob = kv.get_double("synth.inter_edge_prob", c.synth.inter_edge_prob);
  c.synth.type_affinity = kv.get_double("synth.type_affinity", c.synth.type_affinity);
  c.synth.num_edges_target = size("synth.num_edges_target", c.synth.num_edges_target);
  c.synth.test_fraction = kv.get_double("synth.test_fraction", c.synth.test_fraction);
  c.synth.multiplicity_cap = size("synth.multiplicity_cap", c.synth.multiplicity_cap);
  return c;
}

KvConfig PipelineConfig::to_kv() const {
  KvConfig kv;
  auto num = [](double v) { return csv::format_double(v); };
  kv.set("workdir", workdir.string());
  kv.set("kind", ingest::to_string(kind));
  if (!use_synth) {
    if (!edges.empty()) kv.set("edges", edges.string());
    if (!test.empty()) kv.set("test", test.string());
  }
  if (!node_features.empty()) kv.set("node_features", node_features.string());
  if (!layout.empty()) kv.set("layout", layout.string());
  kv.set("test_labeled", test_labeled ? "true" : "false");
  kv.set("synth", use_synth ? "true" : "false");
  kv.set("seed", std::to_string(seed));
  kv.set("threads", std::to_string(threads));
  kv.set("neg_ratio", num(sampler.neg_ratio));
  if (sampler.sample_size) kv.set("sample_size", std::to_string(*sampler.sample_size));
  kv.set("shuffle", sampler.shuffle == trainset::ShuffleMode::kJoint ? "joint" : "independent");
  kv.set("line.dim", std::to_string(line.dim));
  kv.set("line.order", embed::to_string(line.order));
  kv.set("line.epochs", num(line.epochs));
  kv.set("line.neg_k", std::to_string(line.neg_k));
  kv.set("line.lr", num(line.lr_init));
  kv.set("gbdt.num_trees", std::to_string(gbdt.num_trees));
  kv.set("gbdt.max_depth", std::to_string(gbdt.max_depth));
  kv.set("gbdt.learning_rate", num(gbdt.learning_rate));
  kv.set("gbdt.min_samples_leaf", std::to_string(gbdt.min_samples_leaf));
  kv.set("gbdt.max_bins", std::to_string(gbdt.max_bins));
  kv.set("gbdt.subsample", num(gbdt.subsample));
  kv.set("gbdt.l2", num(gbdt.l2));
  kv.set("features", families.to_string());
  kv.set("two_hop", feature_opts.two_hop == features::TwoHopMode::kBinary ? "binary" : "multiplicity");
  kv.set("exclude_self_edge", feature_opts.exclude_self_edge ? "true" : "false");
  if (use_synth) {
    kv.set("synth.num_nodes", std::to_string(synth.num_nodes));
    kv.set("synth.num_communities", std::to_string(synth.num_communities));
    kv.set("synth.num_edge_types", std::to_string(synth.num_edge_types));
    kv.set("synth.intra_edge_prob", num(synth.intra_edge_prob));
    kv.set("synth.inter_edge_prob", num(synth.inter_edge_prob));
    kv.set("synth.type_affinity", num(synth.type_affinity));
    kv.set("synth.num_edges_target", std::to_string(synth.num_edges_target));
    kv.set("synth.test_fraction", num(synth.test_fraction));
    kv.set("synth.multiplicity_cap", std::to_string(synth.multiplicity_cap));
  }
  return kv;
}

void PipelineConfig::finalize() {
  if (threads < 1) throw Error("threads must be >= 1");
  sampler.seed = seed;
  line.seed = seed;
  line.threads = threads;
  gbdt.seed = seed;
  synth.seed = seed;
  if (use_synth) {
    edges = Artifacts{workdir}.synth_dir() / "edges.csv";
    test = Artifacts{workdir}.synth_dir() / "test.csv";
    synth.validate();
  }
  line.validate();
  gbdt.validate();
  families.validate();
}

// ---- manifest ----

std::string RunManifest::to_json() const {
  json j;
  j["format"] = "tlp-manifest 1";
  j["seed"] = seed;
  j["config"] = json(config.values());
  json st = json::array();
  for (const auto& r : stages) {
    json e;
    e["stage"] = to_string(r.stage);
    e["inputs"] = json::array();
    for (const auto& [p, c] : r.inputs) e["inputs"].push_back({{"path", p}, {"checksum", c}});
    e["outputs"] = json::array();
    for (const auto& [p, c] : r.outputs) e["outputs"].push_back({{"path", p}, {"checksum", c}});
    e["wall_ms"] = r.wall_ms;
    st.push_back(std::move(e));
  }
  j["stages"] = std::move(st);
  j["final_auc"] = final_auc ? json(*final_auc) : json(nullptr);
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "tlp-manifest 1") throw FormatError("not a tlp run manifest");
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) m.config.set(k, v.get<std::string>());
    for (const auto& e : j.at("stages")) {
      StageRecord r;
      r.stage = parse_stage(e.at("stage").get<std::string>());
      for (const auto& f : e.at("inputs")) r.inputs.emplace_back(f.at("path"), f.at("checksum"));
      for (const auto& f : e.at("outputs")) r.outputs.emplace_back(f.at("path"), f.at("checksum"));
      r.wall_ms = e.at("wall_ms").get<double>();
      m.stages.push_back(std::move(r));
    }
    if (!j.at("final_auc").is_null()) m.final_auc = j.at("final_auc").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

RunManifest RunManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing manifest: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void write_predictions(const fs::path& path, const std::vector<double>& p) {
  std::ofstream out = csv::open_output(path);
  for (double v : p) out << csv::format_double(v) << '\n';
  if (!out) throw Error("failed writing predictions: " + path.string());
}

std::vector<double> read_predictions(const fs::path& path) {
  csv::LineReader reader(path);
  std::vector<double> out;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto v = csv::parse_double(csv::trim(line));
    if (!v) throw ParseError("bad prediction value", reader.line_number());
    out.push_back(*v);
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

void require(const fs::path& p, const std::string& what, const std::string& producer) {
  if (!fs::exists(p)) {
    throw Error("missing " + what + ": " + p.string() + " (run the " + producer + " stage first)");
  }
}

void require_input(const fs::path& p, const std::string& what) {
  if (p.empty()) throw Error("missing " + what + ": no path configured");
  if (!fs::exists(p)) throw Error("missing " + what + ": " + p.string());
}

std::string display_path(const fs::path& p, const fs::path& workdir) {
  const fs::path rel = p.lexically_relative(workdir);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.string();
}

struct StageContext {
  const PipelineConfig& cfg;
  Artifacts art;
  StageRecord rec;
  std::optional<double> auc;

  void input(const fs::path& p) { rec.inputs.emplace_back(display_path(p, art.dir), file_checksum(p)); }
  void output(const fs::path& p) { rec.outputs.emplace_back(display_path(p, art.dir), file_checksum(p)); }
};

ingest::CsvLayout layout_of(const PipelineConfig& cfg) {
  if (cfg.layout.empty()) return {};
  return ingest::CsvLayout::from_config(KvConfig::load(cfg.layout));
}

GraphBundle load_graph_artifact(const Artifacts& a) {
  require(a.graph(), "graph", "ingest");
  return load_graph(a.graph());
}

std::vector<ingest::Query> load_test_queries(const Artifacts& a, const GraphBundle& b, bool labeled) {
  require(a.test_queries(), "test queries", "ingest");
  return ingest::parse_queries(a.test_queries(), labeled, ingest::DatasetKind::kA,
                               IdMap::identity(b.ids.size()), std::nullopt)
      .queries;
}

std::vector<int> labels_of(const std::vector<ingest::Query>& qs) {
  std::vector<int> y;
  y.reserve(qs.size());
  for (const auto& q : qs) {
    if (!q.label) throw Error("test queries carry no labels");
    y.push_back(*q.label);
  }
  return y;
}

bool needs_embeddings(const features::FeatureFamilies& f) { return f.line || f.crossing; }

void stage_ingest(StageContext& ctx) {
  const PipelineConfig& cfg = ctx.cfg;
  if (cfg.use_synth) {
    const auto data = synth::generate(cfg.synth);
    synth::write_dataset(ctx.art.synth_dir(), data, cfg.synth);
  }
  require_input(cfg.edges, "edges file");
  require_input(cfg.test, "test file");
  const auto layout = layout_of(cfg);
  ctx.input(cfg.edges);
  ctx.input(cfg.test);
  if (!cfg.layout.empty()) ctx.input(cfg.layout);
  auto parsed = ingest::parse_edges(cfg.edges, cfg.kind, layout);
  NodeFeatureTable nf;
  if (!cfg.node_features.empty()) {
    require_input(cfg.node_features, "node feature file");
    ctx.input(cfg.node_features);
    nf = ingest::parse_node_features(cfg.node_features, parsed.ids, layout);
  }
  GraphBundle bundle = ingest::make_bundle(std::move(parsed), std::move(nf));
  const auto queries =
      ingest::parse_queries(cfg.test, cfg.test_labeled, cfg.kind, bundle.ids, bundle.offset, layout);
  save_graph(ctx.art.graph(), bundle);
  save_id_map_text(ctx.art.id_map(), bundle.ids, bundle.offset);
  ingest::write_queries_csv(ctx.art.test_queries(), queries.queries);
  ctx.output(ctx.art.graph());
  ctx.output(ctx.art.id_map());
  ctx.output(ctx.art.test_queries());
}

void stage_analyze(StageContext& ctx) {
  const GraphBundle b = load_graph_artifact(ctx.art);
  const auto queries = load_test_queries(ctx.art, b, true);
  ctx.input(ctx.art.graph());
  ctx.input(ctx.art.test_queries());
  const auto labels = labels_of(queries);
  const std::vector<analysis::ExistenceReport> reports = {
      analysis::existence_report(b.graph, queries, false),
      analysis::existence_report(b.graph, queries, true)};
  std::ofstream out = csv::open_output(ctx.art.analysis());
  out << analysis::format_existence(reports, false);
  for (bool with_etype : {false, true}) {
    const auto naive = eval::auc(analysis::naive_predict(b.graph, queries, with_etype), labels);
    out << "naive_auc" << (with_etype ? "_etype " : " ") << csv::format_double(naive.auc) << '\n';
  }
  out << "edge_feature_density " << csv::format_double(analysis::edge_feature_density(b.graph.edges()))
      << '\n';
  out.close();
  ctx.output(ctx.art.analysis());
}

void stage_build_train(StageContext& ctx) {
  const GraphBundle b = load_graph_artifact(ctx.art);
  ctx.input(ctx.art.graph());
  const auto ts = trainset::assemble_train_set(b.graph, ctx.cfg.sampler);
  trainset::write_train_csv(ctx.art.train_set(), ts.instances);

  trainset::ColumnTable cols;
  cols.columns = {"src", "dst", "etype", "ts"};
  for (std::size_t i = 0; i < b.graph.edge_feature_dim(); ++i) cols.columns.push_back("edge_feat_" + std::to_string(i));
  const auto dropped = trainset::drop_redundant_columns(cols, ctx.cfg.kind);
  json j;
  j["num_positives"] = ts.num_positives;
  j["raw_negatives"] = ts.raw_negatives;
  j["collisions"] = ts.collisions;
  j["num_negatives"] = ts.num_negatives;
  j["rows"] = ts.instances.size();
  j["kept_columns"] = dropped.table.columns;
  j["dropped_columns"] = dropped.dropped;
  std::ofstream out = csv::open_output(ctx.art.train_manifest());
  out << j.dump(2) << '\n';
  out.close();
  ctx.output(ctx.art.train_set());
  ctx.output(ctx.art.train_manifest());
}

void stage_embed(StageContext& ctx) {
  const GraphBundle b = load_graph_artifact(ctx.art);
  ctx.input(ctx.art.graph());
  embed::save_embeddings(ctx.art.embeddings(), embed::train_line(b.graph, ctx.cfg.line));
  ctx.output(ctx.art.embeddings());
}

void stage_featurize(StageContext& ctx) {
  const PipelineConfig& cfg = ctx.cfg;
  const GraphBundle b = load_graph_artifact(ctx.art);
  require(ctx.art.train_set(), "train set", "build-train");
  const auto queries = load_test_queries(ctx.art, b, cfg.test_labeled);
  ctx.input(ctx.art.graph());
  ctx.input(ctx.art.train_set());
  ctx.input(ctx.art.test_queries());
  std::optional<embed::EmbeddingTable> emb;
  if (needs_embeddings(cfg.families)) {
    require(ctx.art.embeddings(), "embeddings", "embed");
    ctx.input(ctx.art.embeddings());
    emb = embed::load_embeddings(ctx.art.embeddings());
  }
  const embed::EmbeddingTable* e = emb ? &*emb : nullptr;
  const std::size_t nf_dim = b.graph.node_features().dim;

  const auto train = trainset::read_train_csv(ctx.art.train_set());
  std::vector<int> train_labels;
  for (const auto& t : train) train_labels.push_back(t.label);
  const auto train_rows = features::featurize_all(b.graph, e, features::keys_of(train), cfg.feature_opts, cfg.threads);
  write_feature_csv(ctx.art.train_features(),
                    features::assemble(train_rows, e, cfg.families, nf_dim, std::move(train_labels)));

  std::vector<int> test_labels;
  if (cfg.test_labeled) test_labels = labels_of(queries);
  const auto test_rows = features::featurize_all(b.graph, e, features::keys_of(queries), cfg.feature_opts, cfg.threads);
  write_feature_csv(ctx.art.test_features(),
                    features::assemble(test_rows, e, cfg.families, nf_dim, std::move(test_labels)));
  ctx.output(ctx.art.train_features());
  ctx.output(ctx.art.test_features());
}

void stage_train(StageContext& ctx) {
  require(ctx.art.train_features(), "train features", "featurize");
  ctx.input(ctx.art.train_features());
  const FeatureMatrix x = read_feature_csv(ctx.art.train_features());
  if (!x.labeled()) throw Error("train features carry no label column");
  gbdt::fit(x, x.labels, ctx.cfg.gbdt).save(ctx.art.model());
  ctx.output(ctx.art.model());
}

void stage_predict(StageContext& ctx) {
  require(ctx.art.model(), "model", "train");
  require(ctx.art.test_features(), "test features", "featurize");
  ctx.input(ctx.art.model());
  ctx.input(ctx.art.test_features());
  const auto model = gbdt::GbdtModel::load(ctx.art.model());
  write_predictions(ctx.art.predictions(), model.predict_proba(read_feature_csv(ctx.art.test_features())));
  ctx.output(ctx.art.predictions());
}

void stage_eval(StageContext& ctx) {
  require(ctx.art.predictions(), "predictions", "predict");
  const GraphBundle b = load_graph_artifact(ctx.art);
  const auto queries = load_test_queries(ctx.art, b, true);
  ctx.input(ctx.art.predictions());
  ctx.input(ctx.art.test_queries());
  const auto p = read_predictions(ctx.art.predictions());
  const auto labels = labels_of(queries);
  if (p.size() != labels.size()) {
    throw Error("predictions has " + std::to_string(p.size()) + " rows, test queries " +
                std::to_string(labels.size()));
  }
  const auto r = eval::auc(p, labels);
  std::ofstream out = csv::open_output(ctx.art.eval());
  out << eval::format_auc(r, false);
  out.close();
  ctx.auc = r.auc;
  ctx.output(ctx.art.eval());
}

}  // namespace

RunManifest run_pipeline(PipelineConfig cfg, const std::vector<Stage>& stages) {
  cfg.finalize();
  const Artifacts art{cfg.workdir};
  fs::create_directories(art.dir);
  RunManifest manifest;
  if (fs::exists(art.manifest())) manifest = RunManifest::load(art.manifest());
  manifest.seed = cfg.seed;
  manifest.config = cfg.to_kv();

  std::set<Stage> ordered(stages.begin(), stages.end());
  for (Stage s : ordered) {
    StageContext ctx{cfg, art, {}, std::nullopt};
    ctx.rec.stage = s;
    const auto t0 = Clock::now();
    switch (s) {
      case Stage::kIngest: stage_ingest(ctx); break;
      case Stage::kAnalyze: stage_analyze(ctx); break;
      case Stage::kBuildTrain: stage_build_train(ctx); break;
      case Stage::kEmbed: stage_embed(ctx); break;
      case Stage::kFeaturize: stage_featurize(ctx); break;
      case Stage::kTrain: stage_train(ctx); break;
      case Stage::kPredict: stage_predict(ctx); break;
      case Stage::kEval: stage_eval(ctx); break;
    }
    ctx.rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (ctx.auc) manifest.final_auc = ctx.auc;
    std::erase_if(manifest.stages, [s](const StageRecord& r) { return r.stage == s; });
    manifest.stages.push_back(std::move(ctx.rec));
    std::sort(manifest.stages.begin(), manifest.stages.end(),
              [](const StageRecord& a, const StageRecord& b) { return a.stage < b.stage; });
    std::ofstream out = csv::open_output(art.manifest());
    out << manifest.to_json();
  }
  return manifest;
}

RunManifest replay(const RunManifest& manifest, const fs::path& workdir) {
  KvConfig kv = manifest.config;
  kv.set("workdir", workdir.string());
  kv.set("seed", std::to_string(manifest.seed));
  const PipelineConfig cfg = PipelineConfig::from_kv(kv);
  std::vector<Stage> stages;
  for (const auto& r : manifest.stages) stages.push_back(r.stage);
  if (stages.empty()) throw Error("manifest records no stages");
  return run_pipeline(cfg, stages);
}

std::vector<std::pair<std::string, features::FeatureFamilies>> ablation_rows() {
  using F = features::FeatureFamilies;
  return {{"raw", F{true, false, false, false}},
          {"+line", F{true, true, false, false}},
          {"+subgraph", F{true, false, false, true}},
          {"+line+subgraph", F{true, true, false, true}},
          {"+line+crossing", F{true, true, true, false}},
          {"all", F{true, true, true, true}}};
}

AblationTable ablate(PipelineConfig cfg) {
  cfg.finalize();
  const Artifacts art{cfg.workdir};
  const GraphBundle b = load_graph_artifact(art);
  require(art.train_set(), "train set", "build-train");
  require(art.embeddings(), "embeddings", "embed");
  const auto queries = load_test_queries(art, b, true);
  const auto test_labels = labels_of(queries);
  const auto train = trainset::read_train_csv(art.train_set());
  std::vector<int> train_labels;
  for (const auto& t : train) train_labels.push_back(t.label);
  const auto emb = embed::load_embeddings(art.embeddings());
  const std::size_t nf_dim = b.graph.node_features().dim;

  const auto train_rows = features::featurize_all(b.graph, &emb, features::keys_of(train), cfg.feature_opts, cfg.threads);
  const auto test_rows = features::featurize_all(b.graph, &emb, features::keys_of(queries), cfg.feature_opts, cfg.threads);

  AblationTable table;
  table.naive_auc = eval::auc(analysis::naive_predict(b.graph, queries, false), test_labels).auc;
  table.naive_auc_etype = eval::auc(analysis::naive_predict(b.graph, queries, true), test_labels).auc;
  for (const auto& [name, fam] : ablation_rows()) {
    const FeatureMatrix xtr = features::assemble(train_rows, &emb, fam, nf_dim, train_labels);
    const FeatureMatrix xte = features::assemble(test_rows, &emb, fam, nf_dim);
    const auto model = gbdt::fit(xtr, train_labels, cfg.gbdt);
    table.rows.push_back({name, fam, eval::auc(model.predict_proba(xte), test_labels).auc});
  }
  return table;
}

std::string format_ablation(const AblationTable& t, bool as_csv) {
  std::ostringstream out;
  if (as_csv) {
    out << "feature_set,auc\n";
    for (const auto& r : t.rows) out << r.name << ',' << csv::format_double(r.auc) << '\n';
    out << "naive," << csv::format_double(t.naive_auc) << '\n';
    out << "naive_etype," << csv::format_double(t.naive_auc_etype) << '\n';
    return out.str();
  }
  char buf[64];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%-16s %.6f\n", r.name.c_str(), r.auc);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-16s %.6f\n", "naive", t.naive_auc);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-16s %.6f\n", "naive_etype", t.naive_auc_etype);
  out << buf;
  return out.str();
}

}  // namespace tlp::pipeline
