#include "tlp/kv_config.h"

#include <fstream>
#include <sstream>

#include "tlp/csv.h"
#include "tlp/error.h"

namespace tlp {

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = csv::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    const std::string key(csv::trim(view.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", lineno);
    cfg.values_[key] = std::string(csv::trim(view.substr(eq + 1)));
  }
  return cfg;
}

void KvConfig::merge(const KvConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto raw = get(key);
  if (!raw) return fallback;
  const auto v = csv::parse_int(*raw);
  if (!v) throw Error("config key '" + key + "' is not an integer: " + *raw);
  return *v;
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto raw = get(key);
  if (!raw) return fallback;
  const auto v = csv::parse_int(*raw);
  if (!v || *v < 0) throw Error("config key '" + key + "' is not a non-negative integer: " + *raw);
  return static_cast<std::uint64_t>(*v);
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  const auto raw = get(key);
  if (!raw) return fallback;
  const auto v = csv::parse_double(*raw);
  if (!v) throw Error("config key '" + key + "' is not a number: " + *raw);
  return *v;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const auto raw = get(key);
  if (!raw) return fallback;
  if (*raw == "1" || *raw == "true" || *raw == "yes" || *raw == "on") return true;
  if (*raw == "0" || *raw == "false" || *raw == "no" || *raw == "off") return false;
  throw Error("config key '" + key + "' is not a boolean: " + *raw);
}

std::string KvConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

}  // namespace tlp
