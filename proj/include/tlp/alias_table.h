#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tlp/rng.h"

namespace tlp::embed {

// Walker/Vose alias table: O(n) build, O(1) draws from the categorical
// distribution proportional to the build weights.
class AliasTable {
 public:
  AliasTable() = default;

  // Throws when a weight is negative or non-finite, or all weights are zero.
  static AliasTable build(std::span<const double> weights);

  std::size_t sample(Rng& rng) const {
    const std::size_t column = rng.uniform_index(prob_.size());
    return rng.uniform01() < prob_[column] ? column : alias_[column];
  }

  std::size_t size() const { return prob_.size(); }
  std::span<const double> prob() const { return prob_; }
  std::span<const std::uint32_t> alias() const { return alias_; }

  // Exact probability mass the table assigns to item i.
  double probability(std::size_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace tlp::embed
