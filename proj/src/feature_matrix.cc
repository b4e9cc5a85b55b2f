#include "tlp/feature_matrix.h"

#include "tlp/csv.h"
#include "tlp/error.h"

namespace tlp {

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::ofstream out = csv::open_output(path);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) out << ',';
    out << m.names[c];
  }
  if (m.labeled()) out << (m.cols() ? ",label" : "label");
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < m.rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) line += ',';
      line += csv::format_double(m.at(r, c));
    }
    if (m.labeled()) {
      if (m.cols()) line += ',';
      line += static_cast<char>('0' + m.labels[r]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error("failed writing feature file: " + path.string());
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  csv::LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw FormatError("empty feature file: " + path.string());
  FeatureMatrix m;
  for (auto name : csv::split(line, ',')) m.names.emplace_back(name);
  const bool labeled = !m.names.empty() && m.names.back() == "label";
  if (labeled) m.names.pop_back();
  const std::size_t width = m.names.size() + (labeled ? 1 : 0);
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line, ',');
    if (fields.size() != width) throw ParseError("wrong column count", reader.line_number());
    for (std::size_t c = 0; c < m.names.size(); ++c) {
      const auto v = csv::parse_double(fields[c]);
      if (!v) throw ParseError("non-numeric feature", reader.line_number());
      m.values.push_back(*v);
    }
    if (labeled) {
      const auto y = csv::parse_int(fields.back());
      if (!y || (*y != 0 && *y != 1)) throw ParseError("bad label", reader.line_number());
      m.labels.push_back(static_cast<int>(*y));
    }
    ++m.rows;
  }
  return m;
}

}  // namespace tlp
