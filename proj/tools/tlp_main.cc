// tlp: command-line driver for the temporal link prediction pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tlp/analysis.h"
#include "tlp/csv.h"
#include "tlp/error.h"
#include "tlp/graph_io.h"
#include "tlp/metrics.h"
#include "tlp/pipeline.h"
#include "tlp/synth.h"

namespace fs = std::filesystem;
using namespace tlp;

namespace {

constexpr const char* kConfigHelp =
    "Config file keys (key = value, '#' comments; flags override the file, the file\n"
    "overrides the workdir's manifest.json, which overrides defaults):\n"
    "  workdir kind(A|B) edges test node_features layout test_labeled synth seed threads\n"
    "  neg_ratio sample_size shuffle(joint|independent)\n"
    "  line.dim line.order(first|second|both) line.epochs line.neg_k line.lr\n"
    "  gbdt.num_trees gbdt.max_depth gbdt.learning_rate gbdt.min_samples_leaf\n"
    "  gbdt.max_bins gbdt.subsample gbdt.l2\n"
    "  features(all|raw,line,crossing,subgraph) two_hop(multiplicity|binary) exclude_self_edge\n"
    "  synth.num_nodes synth.num_communities synth.num_edge_types synth.intra_edge_prob\n"
    "  synth.inter_edge_prob synth.type_affinity synth.num_edges_target synth.test_fraction\n"
    "  synth.multiplicity_cap\n";

// Flags that map one-to-one onto config keys.
class KvFlags {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = app->add_option(flag, *value, help + " [" + key + "]");
    entries_.push_back({key, value, opt});
  }
  void apply(KvConfig& kv) const {
    for (const auto& e : entries_) {
      if (e.opt->count() > 0) kv.set(e.key, *e.value);
    }
  }

 private:
  struct Entry {
    std::string key;
    std::shared_ptr<std::string> value;
    CLI::Option* opt;
  };
  std::vector<Entry> entries_;
};

struct Common {
  std::string config;
  std::vector<std::string> sets;
  KvFlags flags;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Key-value config file");
  app->add_option("--set", c.sets, "Override a config key (key=value), repeatable");
  c.flags.add(app, "--workdir", "workdir", "Artifact directory");
  c.flags.add(app, "--seed", "seed", "Seed for randomized stages (default 42)");
  c.flags.add(app, "--threads", "threads", "Worker threads (default 1, deterministic)");
  app->footer(kConfigHelp);
}

pipeline::PipelineConfig resolve(const Common& c) {
  KvConfig top;
  if (!c.config.empty()) top = KvConfig::load(c.config);
  KvConfig flags;
  c.flags.apply(flags);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + s + "'");
    flags.set(std::string(csv::trim(s.substr(0, eq))), std::string(csv::trim(s.substr(eq + 1))));
  }
  top.merge(flags);
  const fs::path workdir = top.get_string("workdir", pipeline::PipelineConfig{}.workdir.string());
  KvConfig kv;
  const pipeline::Artifacts art{workdir};
  if (fs::exists(art.manifest())) kv = pipeline::RunManifest::load(art.manifest()).config;
  kv.merge(top);
  kv.set("workdir", workdir.string());
  return pipeline::PipelineConfig::from_kv(kv);
}

void run_stage(const Common& c, pipeline::Stage s) {
  pipeline::run_pipeline(resolve(c), {s});
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (auto f : csv::split(s, ',')) {
    const auto v = csv::parse_double(csv::trim(f));
    if (!v) throw Error("not a number: '" + std::string(f) + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal link prediction pipeline"};
  app.require_subcommand(1);

  // ingest
  Common ingest_c;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse competition CSVs into graph.tlpg and dense test queries");
  add_common(ingest_cmd, ingest_c);
  ingest_c.flags.add(ingest_cmd, "--edges", "edges", "Edge CSV");
  ingest_c.flags.add(ingest_cmd, "--test", "test", "Query CSV");
  ingest_c.flags.add(ingest_cmd, "--kind", "kind", "Dataset kind A or B");
  ingest_c.flags.add(ingest_cmd, "--node-features", "node_features", "Node feature CSV (kind A)");
  ingest_c.flags.add(ingest_cmd, "--layout", "layout", "CSV layout key-value file");
  ingest_c.flags.add(ingest_cmd, "--test-labeled", "test_labeled", "Whether the query CSV has labels");

  // analyze
  Common analyze_c;
  std::string analyze_mode;
  bool analyze_csv = false;
  std::string bound_stat = "mode";
  std::string bound_pool;
  bool leave_self_out = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Existence report, naive strategy, label aggregate bound");
  add_common(analyze_cmd, analyze_c);
  analyze_cmd->add_option("mode", analyze_mode, "existence | naive | bound (omit to write analysis.txt)")
      ->check(CLI::IsMember({"existence", "naive", "bound"}));
  analyze_cmd->add_flag("--csv", analyze_csv, "CSV output");
  analyze_cmd->add_option("--stat", bound_stat, "bound: mode or mean")->check(CLI::IsMember({"mode", "mean"}));
  analyze_cmd->add_option("--pool", bound_pool, "bound: labeled query CSV used as the label pool (raw ids)");
  analyze_cmd->add_flag("--leave-self-out", leave_self_out, "bound without --pool: exclude each query's own label");

  // synth
  Common synth_c;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-partition dataset");
  add_common(synth_cmd, synth_c);
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_c.flags.add(synth_cmd, "--num-nodes", "synth.num_nodes", "Nodes");
  synth_c.flags.add(synth_cmd, "--num-communities", "synth.num_communities", "Communities");
  synth_c.flags.add(synth_cmd, "--num-edge-types", "synth.num_edge_types", "Edge types");
  synth_c.flags.add(synth_cmd, "--intra", "synth.intra_edge_prob", "Intra-community edge probability");
  synth_c.flags.add(synth_cmd, "--inter", "synth.inter_edge_prob", "Inter-community edge probability");
  synth_c.flags.add(synth_cmd, "--type-affinity", "synth.type_affinity", "Preferred edge type probability");
  synth_c.flags.add(synth_cmd, "--num-edges", "synth.num_edges_target", "Edges to sample");
  synth_c.flags.add(synth_cmd, "--test-fraction", "synth.test_fraction", "Share of triples held out");
  synth_c.flags.add(synth_cmd, "--multiplicity-cap", "synth.multiplicity_cap", "Max parallel edges per pair");

  // build-train
  Common train_set_c;
  auto* bt_cmd = app.add_subcommand("build-train", "Shuffle negatives and assemble train.csv");
  add_common(bt_cmd, train_set_c);
  train_set_c.flags.add(bt_cmd, "--neg-ratio", "neg_ratio", "Negatives per positive");
  train_set_c.flags.add(bt_cmd, "--sample-size", "sample_size", "Subsample the assembled set");
  train_set_c.flags.add(bt_cmd, "--shuffle", "shuffle", "joint or independent");

  // embed
  Common embed_c;
  auto* embed_cmd = app.add_subcommand("embed", "Train LINE embeddings");
  add_common(embed_cmd, embed_c);
  embed_c.flags.add(embed_cmd, "--dim", "line.dim", "Dimension per order");
  embed_c.flags.add(embed_cmd, "--order", "line.order", "first, second or both");
  embed_c.flags.add(embed_cmd, "--epochs", "line.epochs", "Edge samples per edge");
  embed_c.flags.add(embed_cmd, "--neg-k", "line.neg_k", "Negatives per sample");
  embed_c.flags.add(embed_cmd, "--lr", "line.lr", "Initial learning rate");

  // featurize
  Common feat_c;
  auto* feat_cmd = app.add_subcommand("featurize", "Write train and test feature CSVs");
  add_common(feat_cmd, feat_c);
  feat_c.flags.add(feat_cmd, "--features", "features", "all or a list of raw,line,crossing,subgraph");
  feat_c.flags.add(feat_cmd, "--two-hop", "two_hop", "multiplicity or binary");
  feat_c.flags.add(feat_cmd, "--exclude-self-edge", "exclude_self_edge", "Leave a positive row's own edge out");

  // train-gbdt
  Common gbdt_c;
  auto* gbdt_cmd = app.add_subcommand("train-gbdt", "Fit the boosted tree classifier");
  add_common(gbdt_cmd, gbdt_c);
  gbdt_c.flags.add(gbdt_cmd, "--trees", "gbdt.num_trees", "Boosting rounds");
  gbdt_c.flags.add(gbdt_cmd, "--depth", "gbdt.max_depth", "Max tree depth");
  gbdt_c.flags.add(gbdt_cmd, "--lr", "gbdt.learning_rate", "Shrinkage");
  gbdt_c.flags.add(gbdt_cmd, "--min-leaf", "gbdt.min_samples_leaf", "Min rows per leaf");
  gbdt_c.flags.add(gbdt_cmd, "--max-bins", "gbdt.max_bins", "Histogram bins (<= 256)");
  gbdt_c.flags.add(gbdt_cmd, "--subsample", "gbdt.subsample", "Row sampling rate per tree");
  gbdt_c.flags.add(gbdt_cmd, "--l2", "gbdt.l2", "Leaf L2 penalty");

  // predict
  Common pred_c;
  auto* pred_cmd = app.add_subcommand("predict", "Score the test features");
  add_common(pred_cmd, pred_c);

  // eval
  Common eval_c;
  std::string eval_mode;
  std::string pred_path, labels_path;
  double auc_self = 0.0;
  std::string auc_all, average;
  bool sample_std = false;
  bool eval_csv = false;
  auto* eval_cmd = app.add_subcommand("eval", "AUC of predictions, or T-score of AUC values");
  add_common(eval_cmd, eval_c);
  eval_cmd->add_option("mode", eval_mode, "auc | tscore")->required()->check(CLI::IsMember({"auc", "tscore"}));
  eval_cmd->add_option("--pred", pred_path, "auc: predictions file (default: workdir stage)");
  eval_cmd->add_option("--labels", labels_path, "auc: file with one 0/1 label per line");
  eval_cmd->add_flag("--csv", eval_csv, "auc: CSV output");
  auto* self_opt = eval_cmd->add_option("--self", auc_self, "tscore: this participant's AUC");
  eval_cmd->add_option("--all", auc_all, "tscore: comma list of every participant's AUC");
  eval_cmd->add_flag("--sample-std", sample_std, "tscore: use the n-1 standard deviation");
  eval_cmd->add_option("--average", average, "tscore: average two T-scores 'a,b'");

  // ablate
  Common abl_c;
  bool abl_csv = false;
  auto* abl_cmd = app.add_subcommand("ablate", "Feature-family ablation table");
  add_common(abl_cmd, abl_c);
  abl_cmd->add_flag("--csv", abl_csv, "CSV output");

  // run
  Common run_c;
  std::string stages = "all";
  std::string replay_from;
  auto* run_cmd = app.add_subcommand("run", "Run pipeline stages and write manifest.json");
  add_common(run_cmd, run_c);
  run_cmd->add_option("--stages", stages, "all or a comma list of ingest,analyze,build-train,embed,featurize,train,predict,eval");
  run_cmd->add_option("--replay", replay_from, "Rerun every stage of this manifest into --workdir");
  run_c.flags.add(run_cmd, "--synth", "synth", "Generate the dataset into workdir/data first");
  run_c.flags.add(run_cmd, "--edges", "edges", "Edge CSV");
  run_c.flags.add(run_cmd, "--test", "test", "Query CSV");
  run_c.flags.add(run_cmd, "--kind", "kind", "Dataset kind A or B");
  run_c.flags.add(run_cmd, "--features", "features", "Feature families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ingest_cmd) {
      run_stage(ingest_c, pipeline::Stage::kIngest);
    } else if (*analyze_cmd) {
      const auto cfg = resolve(analyze_c);
      if (analyze_mode.empty()) {
        pipeline::run_pipeline(cfg, {pipeline::Stage::kAnalyze});
        return 0;
      }
      const pipeline::Artifacts art{cfg.workdir};
      if (!fs::exists(art.graph())) throw Error("missing graph: run the ingest stage first");
      const GraphBundle b = load_graph(art.graph());
      const auto queries = ingest::parse_queries(art.test_queries(), true, ingest::DatasetKind::kA,
                                                 IdMap::identity(b.ids.size()), std::nullopt)
                               .queries;
      std::vector<int> labels;
      for (const auto& q : queries) labels.push_back(*q.label);
      if (analyze_mode == "existence") {
        const std::vector<analysis::ExistenceReport> r = {analysis::existence_report(b.graph, queries, false),
                                                          analysis::existence_report(b.graph, queries, true)};
        std::cout << analysis::format_existence(r, analyze_csv);
      } else if (analyze_mode == "naive") {
        for (bool et : {false, true}) {
          const auto r = eval::auc(analysis::naive_predict(b.graph, queries, et), labels);
          std::cout << (et ? "with_etype" : "without_etype") << (analyze_csv ? "," : " ")
                    << csv::format_double(r.auc) << '\n';
        }
      } else {
        const auto stat = bound_stat == "mode" ? analysis::AggregateStat::kMode : analysis::AggregateStat::kMean;
        for (bool et : {false, true}) {
          eval::AucResult r;
          if (!bound_pool.empty()) {
            const auto pool = ingest::parse_queries(bound_pool, true, cfg.kind, b.ids, b.offset).queries;
            r = analysis::label_aggregate_bound(analysis::to_labeled_keys(pool), queries, stat, et);
          } else {
            r = analysis::label_aggregate_bound_in_sample(queries, stat, et, leave_self_out);
          }
          std::cout << (et ? "with_etype" : "without_etype") << (analyze_csv ? "," : " ")
                    << csv::format_double(r.auc) << '\n';
        }
      }
    } else if (*synth_cmd) {
      auto cfg = resolve(synth_c);
      cfg.finalize();
      const auto data = synth::generate(cfg.synth);
      synth::write_dataset(synth_out, data, cfg.synth);
      std::cout << "edges " << data.graph.num_edges() << " train_queries " << data.train_queries.size()
                << " test_queries " << data.test_queries.size() << '\n';
    } else if (*bt_cmd) {
      run_stage(train_set_c, pipeline::Stage::kBuildTrain);
    } else if (*embed_cmd) {
      run_stage(embed_c, pipeline::Stage::kEmbed);
    } else if (*feat_cmd) {
      run_stage(feat_c, pipeline::Stage::kFeaturize);
    } else if (*gbdt_cmd) {
      run_stage(gbdt_c, pipeline::Stage::kTrain);
    } else if (*pred_cmd) {
      run_stage(pred_c, pipeline::Stage::kPredict);
    } else if (*eval_cmd) {
      if (eval_mode == "tscore") {
        if (!average.empty()) {
          const auto v = parse_list(average);
          if (v.size() != 2) throw Error("--average expects exactly two values");
          std::cout << csv::format_double(eval::average_tscore(v[0], v[1])) << '\n';
        } else {
          if (self_opt->count() == 0 || auc_all.empty()) throw Error("tscore needs --self and --all");
          const eval::TscoreInput in{auc_self, parse_list(auc_all)};
          std::cout << csv::format_double(eval::tscore(in, sample_std ? eval::StdKind::kSample
                                                                    : eval::StdKind::kPopulation))
                    << '\n';
        }
      } else if (!pred_path.empty() || !labels_path.empty()) {
        if (pred_path.empty() || labels_path.empty()) throw Error("auc needs both --pred and --labels");
        const auto p = pipeline::read_predictions(pred_path);
        std::vector<int> y;
        for (double v : pipeline::read_predictions(labels_path)) {
          if (v != 0.0 && v != 1.0) throw Error("labels must be 0 or 1");
          y.push_back(static_cast<int>(v));
        }
        std::cout << eval::format_auc(eval::auc(p, y), eval_csv);
      } else {
        const auto m = pipeline::run_pipeline(resolve(eval_c), {pipeline::Stage::kEval});
        std::cout << "auc " << csv::format_double(m.final_auc.value_or(0.0)) << '\n';
      }
    } else if (*abl_cmd) {
      std::cout << pipeline::format_ablation(pipeline::ablate(resolve(abl_c)), abl_csv);
    } else if (*run_cmd) {
      pipeline::RunManifest m;
      if (!replay_from.empty()) {
        const auto cfg = resolve(run_c);
        m = pipeline::replay(pipeline::RunManifest::load(replay_from), cfg.workdir);
      } else {
        m = pipeline::run_pipeline(resolve(run_c), pipeline::parse_stages(stages));
      }
      for (const auto& r : m.stages) {
        std::printf("%-12s %10.1f ms\n", pipeline::to_string(r.stage).c_str(), r.wall_ms);
      }
      if (m.final_auc) std::cout << "auc " << csv::format_double(*m.final_auc) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
