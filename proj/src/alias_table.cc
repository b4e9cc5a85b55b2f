#include "tlp/alias_table.h"

#include <cmath>

#include "tlp/error.h"

namespace tlp::embed {

AliasTable AliasTable::build(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw Error("alias table: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("alias table: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error("alias table: all weights are zero");

  AliasTable t;
  t.prob_.assign(n, 0.0);
  t.alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    t.alias_[i] = static_cast<std::uint32_t>(i);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    t.prob_[s] = scaled[s];
    t.alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t i : large) t.prob_[i] = 1.0;
  for (std::uint32_t i : small) t.prob_[i] = 1.0;
  return t;
}

double AliasTable::probability(std::size_t i) const {
  const double n = static_cast<double>(prob_.size());
  double p = prob_.at(i) / n;
  for (std::size_t c = 0; c < prob_.size(); ++c) {
    if (alias_[c] == i && c != i) p += (1.0 - prob_[c]) / n;
  }
  return p;
}

}  // namespace tlp::embed
