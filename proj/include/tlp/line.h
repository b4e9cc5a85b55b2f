#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tlp/graph.h"

namespace tlp::embed {

enum class LineOrder : std::uint8_t { kFirst = 1, kSecond = 2, kBoth = 3 };

LineOrder parse_order(const std::string& s);
std::string to_string(LineOrder order);

struct LineConfig {
  std::size_t dim = 128;  // per order; kBoth yields 2 * dim output columns
  LineOrder order = LineOrder::kBoth;
  double epochs = 100.0;  // edge samples = epochs * |edges| per order
  std::size_t neg_k = 5;
  double lr_init = 0.025;
  std::uint64_t seed = 42;
  // 1 = deterministic. More threads update shared rows without locks.
  std::size_t threads = 1;

  void validate() const;
};

// Per-node vertex vectors, plus second-order context vectors when trained.
struct EmbeddingTable {
  std::size_t num_nodes = 0;
  std::size_t dim = 0;  // width of `vectors` rows
  LineOrder order = LineOrder::kFirst;
  std::vector<float> vectors;
  std::size_t context_dim = 0;  // 0 when no context table
  std::vector<float> context;

  std::span<const float> row(NodeId u) const {
    return {vectors.data() + static_cast<std::size_t>(u) * dim, dim};
  }
  std::span<const float> context_row(NodeId u) const {
    return {context.data() + static_cast<std::size_t>(u) * context_dim, context_dim};
  }
  bool has_context() const { return context_dim > 0; }
  bool all_finite() const;

  bool operator==(const EmbeddingTable&) const = default;
};

inline constexpr double kSigmoidClip = 6.0;

// Clipped logistic used in the update coefficient.
inline double clipped_sigmoid(double x) {
  x = std::clamp(x, -kSigmoidClip, kSigmoidClip);
  return 1.0 / (1.0 + std::exp(-x));
}

// Per-sample objective: log s(u.v) + sum_n log s(-u.n), unclipped.
double line_objective(std::span<const double> source, std::span<const double> target,
                      const std::vector<std::vector<double>>& negatives);

struct LineGradients {
  std::vector<double> source;
  std::vector<double> target;
  std::vector<std::vector<double>> negatives;
};

// Analytic gradient of line_objective.
LineGradients line_gradients(std::span<const double> source, std::span<const double> target,
                             const std::vector<std::vector<double>>& negatives);

struct LineStep {
  std::vector<double> source;
  std::vector<double> target;
  std::vector<std::vector<double>> negatives;
};

// One ascent step of size lr from the given point (all gradients evaluated
// before any update). Throws on dimension mismatch.
LineStep line_gradient_step(std::span<const double> source, std::span<const double> target,
                            const std::vector<std::vector<double>>& negatives, double lr);

// In-place form used by the trainer; same arithmetic as line_gradient_step
// when no negative row repeats. `scratch` holds dim values.
template <typename T>
void line_update_inplace(T* source, T* positive, std::span<T* const> negatives, std::size_t dim,
                         double lr, T* scratch) {
  std::fill(scratch, scratch + dim, T(0));
  auto visit = [&](T* target, double label) {
    double dot = 0.0;
    for (std::size_t c = 0; c < dim; ++c) dot += static_cast<double>(source[c]) * target[c];
    const T g = static_cast<T>((label - clipped_sigmoid(dot)) * lr);
    for (std::size_t c = 0; c < dim; ++c) scratch[c] += g * target[c];
    for (std::size_t c = 0; c < dim; ++c) target[c] += g * source[c];
  };
  visit(positive, 1.0);
  for (T* n : negatives) visit(n, 0.0);
  for (std::size_t c = 0; c < dim; ++c) source[c] += scratch[c];
}

// Throws "cannot embed graph with no edges" on an empty graph. Edge types
// are ignored. Nodes without edges keep zero vectors.
EmbeddingTable train_line(const MultiGraph& g, const LineConfig& cfg);

// Binary: "TLPE" u32 version | u32 num_nodes | u32 dim | u8 order |
// u32 context_dim | vectors f32 | context f32.
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;
void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
// One node per line: id then dim floats.
void save_embeddings_text(const std::filesystem::path& path, const EmbeddingTable& table);

}  // namespace tlp::embed
