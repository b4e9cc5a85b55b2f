#include "tlp/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tlp/error.h"

namespace tlp::eval {

AucResult auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("AUC: scores and labels differ in length");
  AucResult r;
  for (int y : labels) {
    if (y == 1) {
      ++r.n_pos;
    } else if (y == 0) {
      ++r.n_neg;
    } else {
      throw Error("AUC: labels must be 0 or 1");
    }
  }
  if (r.n_pos == 0 || r.n_neg == 0) throw Error("AUC undefined: need both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based average ranks of the positives.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(r.n_pos);
  const double nn = static_cast<double>(r.n_neg);
  r.auc = (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
  return r;
}

double tscore(const TscoreInput& in, StdKind std_kind) {
  const auto& all = in.auc_all;
  if (all.empty()) throw Error("T-score: empty participant list");
  if (std::find(all.begin(), all.end(), in.auc_self) == all.end()) {
    throw Error("T-score: participant list must include auc_self");
  }
  const double n = static_cast<double>(all.size());
  const double mean = std::accumulate(all.begin(), all.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : all) ss += (a - mean) * (a - mean);
  const double denom = std_kind == StdKind::kPopulation ? n : n - 1.0;
  if (denom <= 0.0) throw Error("T-score: sample std needs at least two participants");
  const double sd = std::sqrt(ss / denom);
  if (!(sd > 0.0)) throw Error("T-score undefined: zero standard deviation");
  return (in.auc_self - mean) / sd * 0.1 + 0.5;
}

std::string format_auc(const AucResult& r, bool as_csv) {
  char buf[128];
  if (as_csv) {
    std::snprintf(buf, sizeof(buf), "metric,value,n_pos,n_neg\nauc,%.9f,%zu,%zu\n", r.auc,
                  r.n_pos, r.n_neg);
  } else {
    std::snprintf(buf, sizeof(buf), "auc  %.9f  n_pos=%zu  n_neg=%zu\n", r.auc, r.n_pos,
                  r.n_neg);
  }
  return buf;
}

}  // namespace tlp::eval
