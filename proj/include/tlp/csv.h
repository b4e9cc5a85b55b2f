#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlp::csv {

// Splits one line on `delim`. No quoting: the competition files never quote.
std::vector<std::string_view> split(std::string_view line, char delim);

std::string_view trim(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest representation that parses back to the same double.
std::string format_double(double v);
std::string format_float(float v);

// Line reader that strips a trailing '\r' and tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }

 private:
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace tlp::csv
