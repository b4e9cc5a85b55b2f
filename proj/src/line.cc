#include "tlp/line.h"

#include <atomic>
#include <cstring>
#include <fstream>
#include <thread>

#include "tlp/alias_table.h"
#include "tlp/csv.h"
#include "tlp/error.h"
#include "tlp/rng.h"

namespace tlp::embed {

LineOrder parse_order(const std::string& s) {
  if (s == "first" || s == "1") return LineOrder::kFirst;
  if (s == "second" || s == "2") return LineOrder::kSecond;
  if (s == "both") return LineOrder::kBoth;
  throw Error("unknown LINE order '" + s + "' (expected first, second or both)");
}

std::string to_string(LineOrder order) {
  switch (order) {
    case LineOrder::kFirst: return "first";
    case LineOrder::kSecond: return "second";
    case LineOrder::kBoth: return "both";
  }
  return "?";
}

void LineConfig::validate() const {
  if (dim < 1) throw Error("LINE: dim must be >= 1");
  if (neg_k < 1) throw Error("LINE: neg_k must be >= 1");
  if (!(lr_init > 0.0)) throw Error("LINE: lr_init must be > 0");
  if (!(epochs > 0.0)) throw Error("LINE: epochs must be > 0");
  if (threads < 1) throw Error("LINE: threads must be >= 1");
}

bool EmbeddingTable::all_finite() const {
  for (float v : vectors) {
    if (!std::isfinite(v)) return false;
  }
  for (float v : context) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

void check_dims(std::span<const double> source, std::span<const double> target,
                const std::vector<std::vector<double>>& negatives) {
  if (source.size() != target.size()) throw Error("LINE: dimension mismatch");
  for (const auto& n : negatives) {
    if (n.size() != source.size()) throw Error("LINE: dimension mismatch");
  }
}

}  // namespace

double line_objective(std::span<const double> source, std::span<const double> target,
                      const std::vector<std::vector<double>>& negatives) {
  check_dims(source, target, negatives);
  double obj = log_sigmoid(dot(source, target));
  for (const auto& n : negatives) obj += log_sigmoid(-dot(source, n));
  return obj;
}

LineGradients line_gradients(std::span<const double> source, std::span<const double> target,
                             const std::vector<std::vector<double>>& negatives) {
  check_dims(source, target, negatives);
  const std::size_t dim = source.size();
  LineGradients g;
  g.source.assign(dim, 0.0);
  g.target.assign(dim, 0.0);
  const double cp = 1.0 - clipped_sigmoid(dot(source, target));
  for (std::size_t c = 0; c < dim; ++c) {
    g.source[c] += cp * target[c];
    g.target[c] = cp * source[c];
  }
  for (const auto& n : negatives) {
    const double cn = -clipped_sigmoid(dot(source, n));
    std::vector<double> gn(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      g.source[c] += cn * n[c];
      gn[c] = cn * source[c];
    }
    g.negatives.push_back(std::move(gn));
  }
  return g;
}

LineStep line_gradient_step(std::span<const double> source, std::span<const double> target,
                            const std::vector<std::vector<double>>& negatives, double lr) {
  const LineGradients g = line_gradients(source, target, negatives);
  LineStep s;
  s.source.assign(source.begin(), source.end());
  s.target.assign(target.begin(), target.end());
  s.negatives = negatives;
  for (std::size_t c = 0; c < source.size(); ++c) {
    s.source[c] += lr * g.source[c];
    s.target[c] += lr * g.target[c];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    for (std::size_t c = 0; c < source.size(); ++c) s.negatives[k][c] += lr * g.negatives[k][c];
  }
  return s;
}

namespace {

struct Sampler {
  std::vector<NodeId> slot_source;
  AliasTable edges;
  AliasTable noise;
};

Sampler make_sampler(const MultiGraph& g) {
  Sampler s;
  s.slot_source.resize(g.num_slots());
  const auto offsets = g.csr_offsets();
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) s.slot_source[i] = static_cast<NodeId>(u);
  }
  const std::vector<double> slot_weights(g.num_slots(), 1.0);
  s.edges = AliasTable::build(slot_weights);
  std::vector<double> noise(g.num_nodes());
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    noise[u] = std::pow(static_cast<double>(g.degree(static_cast<NodeId>(u))), 0.75);
  }
  s.noise = AliasTable::build(noise);
  return s;
}

struct OrderTables {
  std::vector<float> vertex;
  std::vector<float> context;
};

// One sampled positive plus its negatives; returns false when the sample is
// skipped (first-order self-loop).
struct Draw {
  NodeId u;
  NodeId v;
  std::vector<NodeId> negatives;
};

bool draw(const MultiGraph& g, const Sampler& s, std::size_t neg_k, Rng& rng, bool first,
          Draw& d) {
  const std::size_t slot = s.edges.sample(rng);
  d.u = s.slot_source[slot];
  d.v = g.slots()[slot].neighbor;
  d.negatives.clear();
  for (std::size_t k = 0; k < neg_k; ++k) {
    const auto n = static_cast<NodeId>(s.noise.sample(rng));
    if (n == d.u || n == d.v) continue;
    d.negatives.push_back(n);
  }
  return !(first && d.u == d.v);
}

double learning_rate(const LineConfig& cfg, double progress) {
  return cfg.lr_init * (1.0 - 0.99 * std::min(progress, 1.0));
}

void train_serial(const MultiGraph& g, const Sampler& s, const LineConfig& cfg, bool first,
                  std::uint64_t total, Rng& rng, OrderTables& t) {
  const std::size_t dim = cfg.dim;
  std::vector<float> scratch(dim);
  std::vector<float*> neg_rows;
  float* targets = first ? t.vertex.data() : t.context.data();
  Draw d;
  for (std::uint64_t step = 0; step < total; ++step) {
    const double lr = learning_rate(cfg, static_cast<double>(step) / static_cast<double>(total));
    if (!draw(g, s, cfg.neg_k, rng, first, d)) continue;
    neg_rows.clear();
    for (NodeId n : d.negatives) neg_rows.push_back(targets + static_cast<std::size_t>(n) * dim);
    line_update_inplace<float>(t.vertex.data() + static_cast<std::size_t>(d.u) * dim,
                               targets + static_cast<std::size_t>(d.v) * dim, neg_rows, dim, lr,
                               scratch.data());
  }
}

// Lock-free shared updates: rows are copied in and out with relaxed atomic
// accesses, so concurrent writers may lose updates but never tear a float.
void train_parallel(const MultiGraph& g, const Sampler& s, const LineConfig& cfg, bool first,
                    std::uint64_t total, std::uint64_t seed, OrderTables& t) {
  const std::size_t dim = cfg.dim;
  const std::size_t workers = cfg.threads;
  std::atomic<std::uint64_t> done{0};
  auto work = [&](std::size_t id) {
    Rng rng(derive_seed(seed, 100 + id));
    const std::uint64_t share = total / workers + (id < total % workers ? 1 : 0);
    float* base_v = t.vertex.data();
    float* base_t = first ? t.vertex.data() : t.context.data();
    auto load = [dim](float* row, std::vector<float>& buf) {
      for (std::size_t c = 0; c < dim; ++c) buf[c] = std::atomic_ref<float>(row[c]).load(std::memory_order_relaxed);
    };
    auto store = [dim](float* row, const std::vector<float>& buf) {
      for (std::size_t c = 0; c < dim; ++c) std::atomic_ref<float>(row[c]).store(buf[c], std::memory_order_relaxed);
    };
    std::vector<float> src(dim), pos(dim), scratch(dim);
    std::vector<std::vector<float>> negs(cfg.neg_k, std::vector<float>(dim));
    std::vector<float*> neg_ptrs;
    Draw d;
    for (std::uint64_t step = 0; step < share; ++step) {
      const std::uint64_t global = done.fetch_add(1, std::memory_order_relaxed);
      const double lr = learning_rate(cfg, static_cast<double>(global) / static_cast<double>(total));
      if (!draw(g, s, cfg.neg_k, rng, first, d)) continue;
      float* src_row = base_v + static_cast<std::size_t>(d.u) * dim;
      float* pos_row = base_t + static_cast<std::size_t>(d.v) * dim;
      load(src_row, src);
      load(pos_row, pos);
      neg_ptrs.clear();
      for (std::size_t k = 0; k < d.negatives.size(); ++k) {
        load(base_t + static_cast<std::size_t>(d.negatives[k]) * dim, negs[k]);
        neg_ptrs.push_back(negs[k].data());
      }
      line_update_inplace<float>(src.data(), pos.data(), neg_ptrs, dim, lr, scratch.data());
      store(src_row, src);
      store(pos_row, pos);
      for (std::size_t k = 0; k < d.negatives.size(); ++k) {
        store(base_t + static_cast<std::size_t>(d.negatives[k]) * dim, negs[k]);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t id = 0; id < workers; ++id) pool.emplace_back(work, id);
  for (auto& th : pool) th.join();
}

OrderTables train_order(const MultiGraph& g, const Sampler& s, const LineConfig& cfg, bool first,
                        std::uint64_t seed) {
  const std::size_t dim = cfg.dim;
  OrderTables t;
  t.vertex.resize(g.num_nodes() * dim);
  Rng rng(seed);
  const double half = 0.5 / static_cast<double>(dim);
  for (float& x : t.vertex) x = static_cast<float>((rng.uniform01() * 2.0 - 1.0) * half);
  if (!first) t.context.assign(g.num_nodes() * dim, 0.0f);

  const auto total =
      static_cast<std::uint64_t>(std::ceil(cfg.epochs * static_cast<double>(g.num_edges())));
  if (cfg.threads == 1) {
    train_serial(g, s, cfg, first, total, rng, t);
  } else {
    train_parallel(g, s, cfg, first, total, seed, t);
  }
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    if (g.degree(static_cast<NodeId>(u)) != 0) continue;
    std::fill_n(t.vertex.begin() + static_cast<std::ptrdiff_t>(u * dim), dim, 0.0f);
    if (!first) std::fill_n(t.context.begin() + static_cast<std::ptrdiff_t>(u * dim), dim, 0.0f);
  }
  return t;
}

}  // namespace

EmbeddingTable train_line(const MultiGraph& g, const LineConfig& cfg) {
  cfg.validate();
  if (g.num_edges() == 0) throw Error("cannot embed graph with no edges");
  const Sampler sampler = make_sampler(g);
  EmbeddingTable out;
  out.num_nodes = g.num_nodes();
  out.order = cfg.order;
  switch (cfg.order) {
    case LineOrder::kFirst: {
      OrderTables t = train_order(g, sampler, cfg, true, derive_seed(cfg.seed, 11));
      out.dim = cfg.dim;
      out.vectors = std::move(t.vertex);
      break;
    }
    case LineOrder::kSecond: {
      OrderTables t = train_order(g, sampler, cfg, false, derive_seed(cfg.seed, 12));
      out.dim = cfg.dim;
      out.vectors = std::move(t.vertex);
      out.context_dim = cfg.dim;
      out.context = std::move(t.context);
      break;
    }
    case LineOrder::kBoth: {
      OrderTables a = train_order(g, sampler, cfg, true, derive_seed(cfg.seed, 11));
      OrderTables b = train_order(g, sampler, cfg, false, derive_seed(cfg.seed, 12));
      out.dim = 2 * cfg.dim;
      out.vectors.resize(g.num_nodes() * out.dim);
      for (std::size_t u = 0; u < g.num_nodes(); ++u) {
        std::copy_n(a.vertex.begin() + static_cast<std::ptrdiff_t>(u * cfg.dim), cfg.dim,
                    out.vectors.begin() + static_cast<std::ptrdiff_t>(u * out.dim));
        std::copy_n(b.vertex.begin() + static_cast<std::ptrdiff_t>(u * cfg.dim), cfg.dim,
                    out.vectors.begin() + static_cast<std::ptrdiff_t>(u * out.dim + cfg.dim));
      }
      out.context_dim = cfg.dim;
      out.context = std::move(b.context);
      break;
    }
  }
  return out;
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
  if (!in) throw FormatError("truncated embedding file");
  return v;
}

}  // namespace

void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out = csv::open_output(path);
  out.write("TLPE", 4);
  put<std::uint32_t>(out, kEmbeddingFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.num_nodes));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.dim));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(table.order));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.context_dim));
  out.write(reinterpret_cast<const char*>(table.vectors.data()),
            static_cast<std::streamsize>(table.vectors.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(table.context.data()),
            static_cast<std::streamsize>(table.context.size() * sizeof(float)));
  if (!out) throw Error("failed writing embedding file: " + path.string());
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TLPE", 4) != 0) throw FormatError("not a TLPE embedding file");
  const auto version = get<std::uint32_t>(in);
  if (version != kEmbeddingFormatVersion) {
    throw FormatError("unsupported embedding format version " + std::to_string(version));
  }
  EmbeddingTable t;
  t.num_nodes = get<std::uint32_t>(in);
  t.dim = get<std::uint32_t>(in);
  const auto order = get<std::uint8_t>(in);
  if (order < 1 || order > 3) throw FormatError("bad LINE order in embedding file");
  t.order = static_cast<LineOrder>(order);
  t.context_dim = get<std::uint32_t>(in);
  t.vectors.resize(t.num_nodes * t.dim);
  in.read(reinterpret_cast<char*>(t.vectors.data()),
          static_cast<std::streamsize>(t.vectors.size() * sizeof(float)));
  t.context.resize(t.num_nodes * t.context_dim);
  in.read(reinterpret_cast<char*>(t.context.data()),
          static_cast<std::streamsize>(t.context.size() * sizeof(float)));
  if (!in) throw FormatError("truncated embedding file");
  return t;
}

void save_embeddings_text(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out = csv::open_output(path);
  out << table.num_nodes << ' ' << table.dim << '\n';
  for (std::size_t u = 0; u < table.num_nodes; ++u) {
    out << u;
    for (float v : table.row(static_cast<NodeId>(u))) out << ' ' << csv::format_float(v);
    out << '\n';
  }
}

}  // namespace tlp::embed
