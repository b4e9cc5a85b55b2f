#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlp/feature_matrix.h"

namespace tlp::gbdt {

struct GbdtConfig {
  std::size_t num_trees = 500;
  std::size_t max_depth = 6;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 20;
  std::size_t max_bins = 255;  // at most 256
  std::uint64_t seed = 42;
  double subsample = 1.0;
  double l2 = 1.0;         // lambda on leaf values
  double prob_eps = 1e-6;  // clamp for the base rate

  void validate() const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> row) const;
  std::size_t depth() const;
};

class GbdtModel {
 public:
  GbdtConfig config;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;

  double predict_margin(std::span<const double> row) const;
  // Throws when the column count differs from training.
  std::vector<double> predict_proba(const FeatureMatrix& x) const;

  std::string to_text() const;
  static GbdtModel from_text(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static GbdtModel load(const std::filesystem::path& path);
};

struct SplitResult {
  std::uint32_t threshold_bin = 0;  // left = bins <= threshold_bin
  double gain = 0.0;
};

// Splits with gain at or below this are treated as no improvement.
inline constexpr double kMinSplitGain = 1e-12;

// gain = GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2), both sides holding at
// least min_leaf rows; ties go to the smallest bin. None when no split has
// positive gain.
std::optional<SplitResult> best_split(std::span<const std::uint8_t> bins,
                                      std::span<const double> grads,
                                      std::span<const double> hessians, std::size_t min_leaf,
                                      double l2 = 1.0);

// Per-feature quantile bin boundaries. bin(x) is the first boundary >= x.
class BinMapper {
 public:
  static BinMapper fit(const FeatureMatrix& x, std::size_t max_bins);
  std::uint8_t bin(std::size_t feature, double value) const;
  std::size_t num_bins(std::size_t feature) const { return uppers_[feature].size(); }
  double upper(std::size_t feature, std::size_t bin) const { return uppers_[feature][bin]; }

 private:
  std::vector<std::vector<double>> uppers_;
};

struct FitTrace {
  std::vector<double> train_logloss;  // [0] is the base-score loss
};

// Throws on empty input, fewer than 2 rows, non-0/1 labels or NaN features.
GbdtModel fit(const FeatureMatrix& x, std::span<const int> labels, const GbdtConfig& cfg,
              FitTrace* trace = nullptr);

inline std::vector<double> predict_proba(const GbdtModel& model, const FeatureMatrix& x) {
  return model.predict_proba(x);
}

double sigmoid(double margin);
double logloss(std::span<const double> margins, std::span<const int> labels);

}  // namespace tlp::gbdt
