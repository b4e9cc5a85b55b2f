#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tlp {

// Row-major numeric matrix with named columns, optionally labeled.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::size_t rows = 0;
  std::vector<double> values;
  std::vector<int> labels;  // empty when unlabeled

  std::size_t cols() const { return names.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols(), cols()}; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  bool labeled() const { return !labels.empty(); }
};

// CSV with a header naming every column; a trailing "label" column when
// labels are present.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace tlp
