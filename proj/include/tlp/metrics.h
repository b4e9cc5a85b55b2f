#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tlp::eval {

struct AucResult {
  double auc = 0.5;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Mann-Whitney AUC from average ranks; tied scores earn half credit.
// Throws when lengths differ or either class is missing.
AucResult auc(std::span<const double> scores, std::span<const int> labels);

enum class StdKind { kPopulation, kSample };

struct TscoreInput {
  double auc_self = 0.0;
  std::vector<double> auc_all;  // every participant, including auc_self
};

// (auc_self - mean) / std * 0.1 + 0.5
double tscore(const TscoreInput& in, StdKind std_kind = StdKind::kPopulation);

inline double average_tscore(double t_a, double t_b) { return (t_a + t_b) / 2.0; }

// One line per metric: name, value with 9 decimals, counts.
std::string format_auc(const AucResult& r, bool as_csv);

}  // namespace tlp::eval
