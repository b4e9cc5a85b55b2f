#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace tlp {

// Flat `key = value` configuration. Lines starting with '#' are comments.
// Later assignments override earlier ones, which gives flags > file >
// defaults when flags are merged last.
class KvConfig {
 public:
  static KvConfig load(const std::filesystem::path& path);
  static KvConfig parse(const std::string& text);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void merge(const KvConfig& other);
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

// 64-bit FNV-1a over a file's bytes, rendered as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace tlp
