#include "tlp/ingest.h"

#include <algorithm>
#include <limits>

#include "tlp/csv.h"
#include "tlp/error.h"

namespace tlp::ingest {

DatasetKind parse_kind(const std::string& s) {
  if (s == "A" || s == "a") return DatasetKind::kA;
  if (s == "B" || s == "b") return DatasetKind::kB;
  throw Error("unknown dataset kind '" + s + "' (expected A or B)");
}

std::string to_string(DatasetKind kind) { return kind == DatasetKind::kA ? "A" : "B"; }

CsvLayout CsvLayout::from_config(const KvConfig& cfg) {
  CsvLayout l;
  const std::string delim = cfg.get_string("delimiter", ",");
  if (delim == "tab" || delim == "\\t") {
    l.delimiter = '\t';
  } else if (delim.size() == 1) {
    l.delimiter = delim[0];
  } else {
    throw Error("delimiter must be a single character or 'tab'");
  }
  l.has_header = cfg.get_bool("header", false);
  auto col = [&cfg](const char* key, int fallback) {
    const auto v = cfg.get_int(key, fallback);
    if (v < 0) throw Error(std::string("negative column index for ") + key);
    return static_cast<int>(v);
  };
  l.src_col = col("src_col", l.src_col);
  l.dst_col = col("dst_col", l.dst_col);
  l.etype_col = col("etype_col", l.etype_col);
  l.ts_col = col("ts_col", l.ts_col);
  l.feat_begin_col = col("feat_begin_col", l.feat_begin_col);
  l.start_col = col("start_col", l.start_col);
  l.end_col = col("end_col", l.end_col);
  l.label_col = col("label_col", l.label_col);
  l.node_id_col = col("node_id_col", l.node_id_col);
  l.node_feat_begin_col = col("node_feat_begin_col", l.node_feat_begin_col);
  return l;
}

namespace {

std::int64_t require_int(std::string_view field, const char* name, std::size_t line) {
  const auto v = csv::parse_int(field);
  if (!v) throw ParseError(std::string("non-integer ") + name + " field '" + std::string(field) + "'", line);
  return *v;
}

std::int64_t require_id(std::string_view field, const char* name, std::size_t line) {
  const std::int64_t v = require_int(field, name, line);
  if (v < 0) throw ParseError(std::string("negative ") + name, line);
  return v;
}

EdgeTypeId require_etype(std::string_view field, std::size_t line) {
  const std::int64_t v = require_id(field, "etype", line);
  if (v > std::numeric_limits<EdgeTypeId>::max()) throw ParseError("etype too large", line);
  return static_cast<EdgeTypeId>(v);
}

struct RawEdge {
  std::int64_t src;
  std::int64_t dst;
  EdgeTypeId etype;
  Timestamp ts;
  std::optional<std::vector<float>> feat;
};

}  // namespace

EdgeParseResult parse_edges(const std::filesystem::path& path, DatasetKind kind,
                            const CsvLayout& layout) {
  csv::LineReader reader(path);
  EdgeParseResult result;
  std::vector<RawEdge> raw;
  const std::size_t min_cols =
      static_cast<std::size_t>(std::max({layout.src_col, layout.dst_col, layout.etype_col,
                                         layout.ts_col})) + 1;
  std::optional<std::size_t> feat_dim;
  std::string line;
  bool header_pending = layout.has_header;
  while (reader.next(line)) {
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line, layout.delimiter);
    if (fields.size() < min_cols) {
      ++result.malformed_rows;
      continue;
    }
    const std::size_t ln = reader.line_number();
    RawEdge e{require_id(fields[layout.src_col], "src", ln),
              require_id(fields[layout.dst_col], "dst", ln),
              require_etype(fields[layout.etype_col], ln),
              require_int(fields[layout.ts_col], "ts", ln), std::nullopt};
    const auto fb = static_cast<std::size_t>(layout.feat_begin_col);
    if (kind == DatasetKind::kB && fields.size() > fb) {
      const std::size_t n = fields.size() - fb;
      bool any = false;
      std::vector<float> feat(n, 0.0f);
      for (std::size_t i = 0; i < n; ++i) {
        const std::string_view cell = csv::trim(fields[fb + i]);
        if (cell.empty()) continue;
        const auto v = csv::parse_double(cell);
        if (!v) throw ParseError("non-numeric edge feature", ln);
        feat[i] = static_cast<float>(*v);
        any = true;
      }
      if (any) {
        if (!feat_dim) feat_dim = n;
        if (n != *feat_dim) throw ParseError("edge feature column count changed", ln);
        e.feat = std::move(feat);
      }
    }
    raw.push_back(std::move(e));
  }
  if (raw.empty()) throw Error("no edges in " + path.string());

  result.edge_feature_dim = feat_dim.value_or(0);
  result.edges.reserve(raw.size());
  if (kind == DatasetKind::kB) {
    std::int64_t max_user = 0;
    std::int64_t max_item = 0;
    for (const RawEdge& e : raw) {
      max_user = std::max(max_user, e.src);
      max_item = std::max(max_item, e.dst);
    }
    const BipartiteOffset offset{max_user + 1};
    result.offset = offset;
    result.ids = IdMap::identity(static_cast<std::size_t>(offset.offset_u + max_item + 1));
    for (RawEdge& e : raw) {
      result.edges.push_back({remap_item_id(e.src, false, offset),
                              remap_item_id(e.dst, true, offset), e.etype, e.ts,
                              std::move(e.feat)});
    }
  } else {
    std::vector<std::int64_t> all;
    all.reserve(raw.size() * 2);
    for (const RawEdge& e : raw) {
      all.push_back(e.src);
      all.push_back(e.dst);
    }
    result.ids = IdMap::from_raw_ids(std::move(all));
    for (RawEdge& e : raw) {
      result.edges.push_back({*result.ids.find(e.src), *result.ids.find(e.dst), e.etype, e.ts,
                              std::nullopt});
    }
  }
  for (const auto& e : result.edges) result.rows_with_features += e.feat.has_value();
  return result;
}

QueryParseResult parse_queries(const std::filesystem::path& path, bool labeled,
                               DatasetKind kind, const IdMap& ids,
                               std::optional<BipartiteOffset> offset,
                               const CsvLayout& layout) {
  if (kind == DatasetKind::kB && !offset) {
    throw Error("dataset B queries need the bipartite offset from ingestion");
  }
  csv::LineReader reader(path);
  QueryParseResult result;
  const std::size_t min_cols =
      static_cast<std::size_t>(std::max({layout.src_col, layout.dst_col, layout.etype_col,
                                         layout.start_col, layout.end_col})) + 1;
  auto map_node = [&](std::int64_t raw, bool is_item) -> NodeId {
    std::optional<NodeId> found;
    if (kind == DatasetKind::kB) {
      if (is_item || raw < offset->offset_u) {
        found = ids.find(remap_item_id(raw, is_item, *offset));
      }
    } else {
      found = ids.find(raw);
    }
    if (!found) {
      ++result.unseen_nodes;
      return ids.sentinel();
    }
    return *found;
  };
  std::string line;
  bool header_pending = layout.has_header;
  while (reader.next(line)) {
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (csv::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    const auto fields = csv::split(line, layout.delimiter);
    if (fields.size() < min_cols) throw ParseError("too few columns in query row", ln);
    Query q;
    q.src = map_node(require_id(fields[layout.src_col], "src", ln), false);
    q.dst = map_node(require_id(fields[layout.dst_col], "dst", ln), true);
    q.etype = require_etype(fields[layout.etype_col], ln);
    q.start_ts = require_int(fields[layout.start_col], "start_ts", ln);
    q.end_ts = require_int(fields[layout.end_col], "end_ts", ln);
    if (q.start_ts > q.end_ts) throw ParseError("start_ts > end_ts", ln);
    if (labeled) {
      if (fields.size() <= static_cast<std::size_t>(layout.label_col) ||
          csv::trim(fields[layout.label_col]).empty()) {
        throw ParseError("label column missing", ln);
      }
      const std::int64_t label = require_int(fields[layout.label_col], "label", ln);
      if (label != 0 && label != 1) throw ParseError("label must be 0 or 1", ln);
      q.label = static_cast<int>(label);
    }
    result.queries.push_back(q);
  }
  return result;
}

NodeFeatureTable parse_node_features(const std::filesystem::path& path, const IdMap& ids,
                                     const CsvLayout& layout) {
  csv::LineReader reader(path);
  NodeFeatureTable table;
  std::string line;
  bool header_pending = layout.has_header;
  const auto fb = static_cast<std::size_t>(layout.node_feat_begin_col);
  while (reader.next(line)) {
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (csv::trim(line).empty()) continue;
    const std::size_t ln = reader.line_number();
    const auto fields = csv::split(line, layout.delimiter);
    if (fields.size() <= fb || fields.size() <= static_cast<std::size_t>(layout.node_id_col)) {
      throw ParseError("too few columns in node feature row", ln);
    }
    const std::size_t dim = fields.size() - fb;
    if (table.dim == 0) {
      table.dim = dim;
      table.values.assign((ids.size() + 1) * dim, 0.0f);
    } else if (dim != table.dim) {
      throw ParseError("node feature column count changed", ln);
    }
    const auto node = ids.find(require_id(fields[layout.node_id_col], "node id", ln));
    if (!node) continue;
    for (std::size_t i = 0; i < dim; ++i) {
      const std::string_view cell = csv::trim(fields[fb + i]);
      if (cell.empty()) continue;
      const auto v = csv::parse_double(cell);
      if (!v) throw ParseError("non-numeric node feature", ln);
      table.values[static_cast<std::size_t>(*node) * dim + i] = static_cast<float>(*v);
    }
  }
  return table;
}

GraphBundle make_bundle(EdgeParseResult parsed, NodeFeatureTable node_feats) {
  std::size_t num_types = 0;
  for (const auto& e : parsed.edges) num_types = std::max<std::size_t>(num_types, e.etype + 1u);
  GraphBundle bundle;
  const std::size_t num_nodes = parsed.ids.size() + 1;
  bundle.graph = MultiGraph::build(std::move(parsed.edges), num_nodes, num_types,
                                   Directedness::kUndirected, std::move(node_feats));
  bundle.ids = std::move(parsed.ids);
  bundle.offset = parsed.offset;
  return bundle;
}

void write_edges_csv(const std::filesystem::path& path, std::span<const TemporalEdge> edges,
                     const IdMap& ids, std::optional<BipartiteOffset> offset) {
  std::ofstream out = csv::open_output(path);
  const std::int64_t shift = offset ? offset->offset_u : 0;
  for (const TemporalEdge& e : edges) {
    out << ids.raw_of(e.src) << ',' << ids.raw_of(e.dst) - shift << ',' << e.etype << ','
        << e.ts;
    if (e.feat) {
      for (float f : *e.feat) out << ',' << csv::format_float(f);
    }
    out << '\n';
  }
}

void write_queries_csv(const std::filesystem::path& path, std::span<const Query> queries) {
  std::ofstream out = csv::open_output(path);
  for (const Query& q : queries) {
    out << q.src << ',' << q.dst << ',' << q.etype << ',' << q.start_ts << ',' << q.end_ts;
    if (q.label) out << ',' << *q.label;
    out << '\n';
  }
}

}  // namespace tlp::ingest
