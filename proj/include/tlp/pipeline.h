#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlp/features.h"
#include "tlp/gbdt.h"
#include "tlp/ingest.h"
#include "tlp/kv_config.h"
#include "tlp/line.h"
#include "tlp/synth.h"
#include "tlp/trainset.h"

namespace tlp::pipeline {

enum class Stage { kIngest, kAnalyze, kBuildTrain, kEmbed, kFeaturize, kTrain, kPredict, kEval };

inline constexpr Stage kAllStages[] = {Stage::kIngest,    Stage::kAnalyze, Stage::kBuildTrain,
                                       Stage::kEmbed,     Stage::kFeaturize, Stage::kTrain,
                                       Stage::kPredict,   Stage::kEval};

std::string to_string(Stage s);
Stage parse_stage(const std::string& s);
// "all" or a comma list; returned in pipeline order without duplicates.
std::vector<Stage> parse_stages(const std::string& s);

struct PipelineConfig {
  std::filesystem::path workdir = "work";
  ingest::DatasetKind kind = ingest::DatasetKind::kA;
  std::filesystem::path edges;           // competition-layout edge CSV
  std::filesystem::path test;            // query CSV (labels required for analyze/eval)
  std::filesystem::path node_features;   // optional, kind A
  std::filesystem::path layout;          // optional CsvLayout key-value file
  bool test_labeled = true;
  // When set, the edge and test files are generated into workdir/data.
  bool use_synth = false;

  std::uint64_t seed = 42;  // copied into every randomized stage
  std::size_t threads = 1;

  trainset::SamplerConfig sampler;
  embed::LineConfig line;
  gbdt::GbdtConfig gbdt;
  synth::SynthConfig synth;
  features::FeatureFamilies families;
  features::FeatureOptions feature_opts{features::TwoHopMode::kMultiplicity, true};

  // Keys: see `tlp run --help`. Unknown keys are rejected.
  static PipelineConfig from_kv(const KvConfig& kv);
  KvConfig to_kv() const;
  // Propagates seed and threads into the stage configs and validates them.
  void finalize();
};

// Documented keys accepted by PipelineConfig::from_kv.
const std::vector<std::string>& config_keys();

// Artifact paths inside a workdir.
struct Artifacts {
  std::filesystem::path dir;
  std::filesystem::path graph() const { return dir / "graph.tlpg"; }
  std::filesystem::path id_map() const { return dir / "idmap.txt"; }
  std::filesystem::path test_queries() const { return dir / "test_queries.dense.csv"; }
  std::filesystem::path analysis() const { return dir / "analysis.txt"; }
  std::filesystem::path train_set() const { return dir / "train.csv"; }
  std::filesystem::path train_manifest() const { return dir / "train_manifest.json"; }
  std::filesystem::path embeddings() const { return dir / "embeddings.tlpe"; }
  std::filesystem::path train_features() const { return dir / "train_features.csv"; }
  std::filesystem::path test_features() const { return dir / "test_features.csv"; }
  std::filesystem::path model() const { return dir / "model.gbdt.txt"; }
  std::filesystem::path predictions() const { return dir / "predictions.csv"; }
  std::filesystem::path eval() const { return dir / "eval.txt"; }
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path synth_dir() const { return dir / "data"; }
};

struct StageRecord {
  Stage stage = Stage::kIngest;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, checksum
  std::vector<std::pair<std::string, std::string>> outputs;  // path, checksum
  double wall_ms = 0.0;
};

struct RunManifest {
  std::uint64_t seed = 42;
  KvConfig config;
  std::vector<StageRecord> stages;
  std::optional<double> final_auc;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  static RunManifest load(const std::filesystem::path& path);
};

// Runs the stages in pipeline order. A stage whose inputs are missing throws
// "missing <artifact> ...". The manifest is written to workdir/manifest.json,
// replacing entries of stages that ran again.
RunManifest run_pipeline(PipelineConfig cfg, const std::vector<Stage>& stages);

// Reruns every recorded stage with the recorded config into `workdir`.
RunManifest replay(const RunManifest& manifest, const std::filesystem::path& workdir);

// Predictions file: one probability per line, in test query order.
void write_predictions(const std::filesystem::path& path, const std::vector<double>& p);
std::vector<double> read_predictions(const std::filesystem::path& path);

struct AblationRow {
  std::string name;
  features::FeatureFamilies families;
  double auc = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;
  double naive_auc = 0.0;        // existence of (src, dst) in the graph
  double naive_auc_etype = 0.0;  // existence of (src, dst, etype)
};

// Fixed row order: raw, +line, +subgraph, +line+subgraph, +line+crossing, all.
std::vector<std::pair<std::string, features::FeatureFamilies>> ablation_rows();

// Needs graph, train set, embeddings and labeled test queries in the workdir.
// Features are computed once; every row uses the same train/test split.
AblationTable ablate(PipelineConfig cfg);

std::string format_ablation(const AblationTable& t, bool as_csv);

}  // namespace tlp::pipeline
