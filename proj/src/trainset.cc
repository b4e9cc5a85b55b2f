#include "tlp/trainset.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string_view>

#include "tlp/csv.h"
#include "tlp/error.h"
#include "tlp/rng.h"

namespace tlp::trainset {

namespace {

struct TripleKey {
  NodeId a;
  NodeId b;
  EdgeTypeId etype;

  auto operator<=>(const TripleKey&) const = default;
};

TripleKey canonical(NodeId src, NodeId dst, EdgeTypeId etype, bool undirected) {
  if (undirected && dst < src) std::swap(src, dst);
  return {src, dst, etype};
}

}  // namespace

std::vector<TrainInstance> shuffle_negatives(std::span<const TrainInstance> positives,
                                             const SamplerConfig& cfg) {
  if (positives.empty()) throw Error("shuffle_negatives: no positive instances");
  if (!(cfg.neg_ratio > 0.0)) throw Error("neg_ratio must be positive");
  for (const auto& p : positives) {
    if (p.label != 1) throw Error("shuffle_negatives: positives must carry label 1");
  }
  const std::size_t n = positives.size();
  const auto target = static_cast<std::size_t>(std::ceil(cfg.neg_ratio * static_cast<double>(n)));
  Rng rng(derive_seed(cfg.seed, 1));

  std::vector<TrainInstance> out;
  out.reserve(target);
  std::vector<std::size_t> perm(n);
  std::vector<std::size_t> perm2(n);
  while (out.size() < target) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    if (cfg.shuffle == ShuffleMode::kIndependent) {
      std::iota(perm2.begin(), perm2.end(), 0);
      rng.shuffle(std::span<std::size_t>(perm2));
    }
    std::vector<TrainInstance> round(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = perm[i];
      const std::size_t k = cfg.shuffle == ShuffleMode::kIndependent ? perm2[i] : j;
      round[i] = {positives[i].src, positives[j].dst, positives[k].etype, 0};
    }
    const std::size_t need = target - out.size();
    if (need >= n) {
      out.insert(out.end(), round.begin(), round.end());
    } else {
      std::vector<std::size_t> pick(n);
      std::iota(pick.begin(), pick.end(), 0);
      rng.shuffle(std::span<std::size_t>(pick));
      pick.resize(need);
      std::sort(pick.begin(), pick.end());
      for (std::size_t i : pick) out.push_back(round[i]);
    }
  }
  return out;
}

std::vector<TrainInstance> positives_of(const MultiGraph& g) {
  std::vector<TrainInstance> pos;
  pos.reserve(g.num_edges());
  for (const auto& e : g.edges()) pos.push_back({e.src, e.dst, e.etype, 1});
  return pos;
}

TrainSet assemble_train_set(const MultiGraph& g, const SamplerConfig& cfg) {
  if (g.num_edges() == 0) throw Error("cannot build a train set from a graph with no edges");
  TrainSet ts;
  std::vector<TrainInstance> pos = positives_of(g);
  ts.num_positives = pos.size();

  std::vector<TripleKey> keys;
  keys.reserve(pos.size());
  for (const auto& p : pos) keys.push_back(canonical(p.src, p.dst, p.etype, g.undirected()));
  std::sort(keys.begin(), keys.end());

  std::vector<TrainInstance> neg = shuffle_negatives(pos, cfg);
  ts.raw_negatives = neg.size();
  std::erase_if(neg, [&](const TrainInstance& t) {
    return std::binary_search(keys.begin(), keys.end(),
                              canonical(t.src, t.dst, t.etype, g.undirected()));
  });
  ts.num_negatives = neg.size();
  ts.collisions = ts.raw_negatives - ts.num_negatives;

  ts.instances = std::move(pos);
  ts.instances.insert(ts.instances.end(), neg.begin(), neg.end());
  if (cfg.sample_size && *cfg.sample_size < ts.instances.size()) {
    Rng rng(derive_seed(cfg.seed, 2));
    std::vector<std::size_t> idx(ts.instances.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates for the first sample_size slots.
    for (std::size_t i = 0; i < *cfg.sample_size; ++i) {
      const std::size_t j = i + rng.uniform_index(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(*cfg.sample_size);
    std::sort(idx.begin(), idx.end());
    std::vector<TrainInstance> sampled;
    sampled.reserve(idx.size());
    for (std::size_t i : idx) sampled.push_back(ts.instances[i]);
    ts.instances = std::move(sampled);
  }
  return ts;
}

namespace {

bool is_time_column(const std::string& name) {
  static const std::array<std::string_view, 9> kTime = {
      "ts", "timestamp", "time", "start", "end", "start_ts", "end_ts", "start_time", "end_time"};
  return std::find(kTime.begin(), kTime.end(), name) != kTime.end();
}

}  // namespace

DropResult drop_redundant_columns(const ColumnTable& table, ingest::DatasetKind kind) {
  DropResult result;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const std::string& name = table.columns[c];
    const bool edge_feat = name.rfind("edge_feat", 0) == 0;
    if (is_time_column(name) || (kind == ingest::DatasetKind::kB && edge_feat)) {
      result.dropped.push_back(name);
    } else {
      keep.push_back(c);
      result.table.columns.push_back(name);
    }
  }
  result.table.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<double> r;
    r.reserve(keep.size());
    for (std::size_t c : keep) r.push_back(row.at(c));
    result.table.rows.push_back(std::move(r));
  }
  return result;
}

void write_train_csv(const std::filesystem::path& path, std::span<const TrainInstance> rows) {
  std::ofstream out = csv::open_output(path);
  out << "src,dst,etype,label\n";
  for (const auto& t : rows) out << t.src << ',' << t.dst << ',' << t.etype << ',' << t.label << '\n';
}

std::vector<TrainInstance> read_train_csv(const std::filesystem::path& path) {
  csv::LineReader reader(path);
  std::string line;
  if (!reader.next(line) || line != "src,dst,etype,label") {
    throw FormatError("train set file must start with 'src,dst,etype,label'");
  }
  std::vector<TrainInstance> rows;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line, ',');
    if (f.size() != 4) throw ParseError("expected 4 columns", reader.line_number());
    const auto s = csv::parse_int(f[0]);
    const auto d = csv::parse_int(f[1]);
    const auto r = csv::parse_int(f[2]);
    const auto y = csv::parse_int(f[3]);
    if (!s || !d || !r || !y || *s < 0 || *d < 0 || *r < 0 || (*y != 0 && *y != 1)) {
      throw ParseError("bad train row", reader.line_number());
    }
    rows.push_back({static_cast<NodeId>(*s), static_cast<NodeId>(*d),
                    static_cast<EdgeTypeId>(*r), static_cast<int>(*y)});
  }
  return rows;
}

}  // namespace tlp::trainset
