#include "tlp/graph_io.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "tlp/csv.h"
#include "tlp/error.h"

namespace tlp {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

IdMap::IdMap(std::vector<std::int64_t> raw_of_dense) : raw_of_dense_(std::move(raw_of_dense)) {
  dense_of_raw_.reserve(raw_of_dense_.size());
  for (std::size_t i = 0; i < raw_of_dense_.size(); ++i) {
    if (!dense_of_raw_.emplace(raw_of_dense_[i], static_cast<NodeId>(i)).second) {
      throw FormatError("duplicate raw id in id map: " + std::to_string(raw_of_dense_[i]));
    }
  }
}

IdMap IdMap::from_raw_ids(std::vector<std::int64_t> raw_ids) {
  std::sort(raw_ids.begin(), raw_ids.end());
  raw_ids.erase(std::unique(raw_ids.begin(), raw_ids.end()), raw_ids.end());
  return IdMap(std::move(raw_ids));
}

IdMap IdMap::identity(std::size_t n) {
  std::vector<std::int64_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<std::int64_t>(i);
  return IdMap(std::move(raw));
}

std::optional<NodeId> IdMap::find(std::int64_t raw) const {
  const auto it = dense_of_raw_.find(raw);
  if (it == dense_of_raw_.end()) return std::nullopt;
  return it->second;
}

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("truncated graph file");
  return v;
}

}  // namespace

void save_graph(const std::filesystem::path& path, const GraphBundle& bundle) {
  const MultiGraph& g = bundle.graph;
  std::ofstream out = csv::open_output(path);
  out.write("TLPG", 4);
  put<std::uint32_t>(out, kGraphFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.num_nodes()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.num_edge_types()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(g.directedness()));
  put<std::uint64_t>(out, g.num_edges());
  for (const TemporalEdge& e : g.edges()) {
    put<std::uint32_t>(out, e.src);
    put<std::uint32_t>(out, e.dst);
    put<std::uint16_t>(out, e.etype);
    put<std::int64_t>(out, e.ts);
  }
  const NodeFeatureTable& nf = g.node_features();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(nf.dim));
  if (nf.dim > 0) {
    out.write(reinterpret_cast<const char*>(nf.values.data()),
              static_cast<std::streamsize>(nf.values.size() * sizeof(float)));
  }
  put<std::uint64_t>(out, bundle.ids.size());
  for (std::int64_t raw : bundle.ids.raw_ids()) put<std::int64_t>(out, raw);
  put<std::int64_t>(out, bundle.offset ? bundle.offset->offset_u : -1);
  if (!out) throw Error("failed writing graph file: " + path.string());
}

GraphBundle load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open graph file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TLPG", 4) != 0) throw FormatError("not a TLPG graph file");
  const auto version = get<std::uint32_t>(in);
  if (version != kGraphFormatVersion) {
    throw FormatError("unsupported graph format version " + std::to_string(version));
  }
  const auto num_nodes = get<std::uint32_t>(in);
  const auto num_edge_types = get<std::uint32_t>(in);
  const auto directed = get<std::uint8_t>(in);
  if (directed > 1) throw FormatError("bad directedness flag");
  const auto num_edges = get<std::uint64_t>(in);
  std::vector<TemporalEdge> edges(num_edges);
  for (auto& e : edges) {
    e.src = get<std::uint32_t>(in);
    e.dst = get<std::uint32_t>(in);
    e.etype = get<std::uint16_t>(in);
    e.ts = get<std::int64_t>(in);
  }
  NodeFeatureTable nf;
  nf.dim = get<std::uint32_t>(in);
  if (nf.dim > 0) {
    nf.values.resize(nf.dim * num_nodes);
    in.read(reinterpret_cast<char*>(nf.values.data()),
            static_cast<std::streamsize>(nf.values.size() * sizeof(float)));
    if (!in) throw FormatError("truncated node feature block");
  }
  const auto map_size = get<std::uint64_t>(in);
  std::vector<std::int64_t> raw(map_size);
  for (auto& r : raw) r = get<std::int64_t>(in);
  const auto offset_u = get<std::int64_t>(in);

  GraphBundle bundle;
  bundle.graph = MultiGraph::build(std::move(edges), num_nodes, num_edge_types,
                                   static_cast<Directedness>(directed), std::move(nf));
  bundle.ids = IdMap(std::move(raw));
  if (offset_u >= 0) bundle.offset = BipartiteOffset{offset_u};
  return bundle;
}

void save_id_map_text(const std::filesystem::path& path, const IdMap& ids,
                      std::optional<BipartiteOffset> offset) {
  std::ofstream out = csv::open_output(path);
  if (offset) out << "# offset_u " << offset->offset_u << "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids.raw_of(static_cast<NodeId>(i)) << ' ' << i << '\n';
}

std::pair<IdMap, std::optional<BipartiteOffset>> load_id_map_text(
    const std::filesystem::path& path) {
  csv::LineReader reader(path);
  std::string line;
  std::optional<BipartiteOffset> offset;
  std::vector<std::int64_t> raw;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.rfind("# offset_u ", 0) == 0) {
      const auto v = csv::parse_int(std::string_view(line).substr(11));
      if (!v) throw ParseError("bad offset line", reader.line_number());
      offset = BipartiteOffset{*v};
      continue;
    }
    const auto parts = csv::split(line, ' ');
    if (parts.size() != 2) throw ParseError("expected 'raw dense'", reader.line_number());
    const auto r = csv::parse_int(parts[0]);
    const auto d = csv::parse_int(parts[1]);
    if (!r || !d || *d != static_cast<std::int64_t>(raw.size())) {
      throw ParseError("bad id map entry", reader.line_number());
    }
    raw.push_back(*r);
  }
  return {IdMap(std::move(raw)), offset};
}

}  // namespace tlp
