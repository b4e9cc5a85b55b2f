#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tlp {

// Base for every error raised by the library. The CLI maps these to a
// single-line message and a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
 public:
  GraphError(const std::string& what, std::size_t edge_index)
      : Error(what + " (edge " + std::to_string(edge_index) + ")"),
        edge_index_(edge_index) {}
  explicit GraphError(const std::string& what)
      : Error(what), edge_index_(static_cast<std::size_t>(-1)) {}

  std::size_t edge_index() const { return edge_index_; }

 private:
  std::size_t edge_index_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlp
