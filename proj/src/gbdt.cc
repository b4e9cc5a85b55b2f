#include "tlp/gbdt.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "tlp/csv.h"
#include "tlp/error.h"
#include "tlp/rng.h"

namespace tlp::gbdt {

void GbdtConfig::validate() const {
  if (num_trees < 1) throw Error("GBDT: num_trees must be >= 1");
  if (max_depth < 1) throw Error("GBDT: max_depth must be >= 1");
  if (max_bins < 2 || max_bins > 256) throw Error("GBDT: max_bins must be in [2, 256]");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw Error("GBDT: learning_rate must be in (0, 1]");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw Error("GBDT: subsample must be in (0, 1]");
  if (min_samples_leaf < 1) throw Error("GBDT: min_samples_leaf must be >= 1");
  if (!(l2 >= 0.0)) throw Error("GBDT: l2 must be >= 0");
  if (!(prob_eps > 0.0 && prob_eps < 0.5)) throw Error("GBDT: prob_eps must be in (0, 0.5)");
}

double sigmoid(double margin) {
  if (margin >= 0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

namespace {

// -log p(y | margin)
double point_loss(double margin, int y) {
  const double x = y == 1 ? -margin : margin;
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t n = 0;
};

constexpr std::size_t kBinStride = 256;

double leaf_score(double g, double h, double l2) { return g * g / (h + l2); }

std::optional<SplitResult> scan_histogram(std::span<const HistBin> hist, std::size_t nbins,
                                          std::size_t min_leaf, double l2) {
  double G = 0.0, H = 0.0;
  std::size_t N = 0;
  for (std::size_t b = 0; b < nbins; ++b) {
    G += hist[b].g;
    H += hist[b].h;
    N += hist[b].n;
  }
  const double parent = leaf_score(G, H, l2);
  std::optional<SplitResult> best;
  double gl = 0.0, hl = 0.0;
  std::size_t nl = 0;
  for (std::size_t b = 0; b + 1 < nbins; ++b) {
    gl += hist[b].g;
    hl += hist[b].h;
    nl += hist[b].n;
    if (nl < min_leaf) continue;
    if (N - nl < min_leaf) break;
    const double gain = leaf_score(gl, hl, l2) + leaf_score(G - gl, H - hl, l2) - parent;
    if (gain > kMinSplitGain && (!best || gain > best->gain)) {
      best = SplitResult{static_cast<std::uint32_t>(b), gain};
    }
  }
  return best;
}

}  // namespace

std::optional<SplitResult> best_split(std::span<const std::uint8_t> bins,
                                      std::span<const double> grads,
                                      std::span<const double> hessians, std::size_t min_leaf,
                                      double l2) {
  if (bins.size() != grads.size() || bins.size() != hessians.size()) {
    throw Error("best_split: arrays differ in length");
  }
  if (bins.empty()) return std::nullopt;
  const std::size_t nbins = static_cast<std::size_t>(*std::max_element(bins.begin(), bins.end())) + 1;
  std::vector<HistBin> hist(nbins);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    hist[bins[i]].g += grads[i];
    hist[bins[i]].h += hessians[i];
    ++hist[bins[i]].n;
  }
  return scan_histogram(hist, nbins, min_leaf, l2);
}

BinMapper BinMapper::fit(const FeatureMatrix& x, std::size_t max_bins) {
  BinMapper m;
  m.uppers_.resize(x.cols());
  std::vector<double> col(x.rows);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < x.rows; ++r) col[r] = x.at(r, f);
    std::sort(col.begin(), col.end());
    // Distinct values with counts.
    std::vector<double> values;
    std::vector<std::size_t> counts;
    for (double v : col) {
      if (values.empty() || v != values.back()) {
        values.push_back(v);
        counts.push_back(1);
      } else {
        ++counts.back();
      }
    }
    std::vector<double>& uppers = m.uppers_[f];
    auto cut_after = [&](std::size_t i) {
      const double mid = values[i] + (values[i + 1] - values[i]) / 2.0;
      if (uppers.empty() || mid > uppers.back()) uppers.push_back(mid);
    };
    if (values.size() <= max_bins) {
      for (std::size_t i = 0; i + 1 < values.size(); ++i) cut_after(i);
    } else {
      const double per_bin = static_cast<double>(x.rows) / static_cast<double>(max_bins);
      std::size_t acc = 0;
      for (std::size_t i = 0; i + 1 < values.size() && uppers.size() + 1 < max_bins; ++i) {
        acc += counts[i];
        if (static_cast<double>(acc) >= per_bin * static_cast<double>(uppers.size() + 1)) cut_after(i);
      }
    }
    uppers.push_back(std::numeric_limits<double>::infinity());
  }
  return m;
}

std::uint8_t BinMapper::bin(std::size_t feature, double value) const {
  const auto& u = uppers_[feature];
  return static_cast<std::uint8_t>(std::lower_bound(u.begin(), u.end(), value) - u.begin());
}

double Tree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

std::size_t Tree::depth() const {
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t i) -> std::size_t {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(rec(static_cast<std::size_t>(n.left)), rec(static_cast<std::size_t>(n.right)));
  };
  return nodes.empty() ? 0 : rec(0);
}

double GbdtModel::predict_margin(std::span<const double> row) const {
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.predict(row);
  return base_score + learning_rate * sum;
}

std::vector<double> GbdtModel::predict_proba(const FeatureMatrix& x) const {
  if (x.cols() != feature_names.size()) {
    throw Error("predict: matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                std::to_string(feature_names.size()));
  }
  std::vector<double> out(x.rows);
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = std::clamp(sigmoid(predict_margin(x.row(r))), kLo, kHi);
  return out;
}

double logloss(std::span<const double> margins, std::span<const int> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) s += point_loss(margins[i], labels[i]);
  return margins.empty() ? 0.0 : s / static_cast<double>(margins.size());
}

namespace {

struct Work {
  std::int32_t node = 0;
  std::vector<std::uint32_t> rows;
  std::vector<HistBin> hist;  // cols * kBinStride
};

struct Trainer {
  const GbdtConfig& cfg;
  std::size_t rows;
  std::size_t cols;
  std::vector<std::uint8_t> binned;  // column-major
  std::vector<std::size_t> nbins;
  std::vector<double> grad;
  std::vector<double> hess;

  void build_hist(Work& w) const {
    w.hist.assign(cols * kBinStride, HistBin{});
    for (std::size_t f = 0; f < cols; ++f) {
      const std::uint8_t* col = binned.data() + f * rows;
      HistBin* h = w.hist.data() + f * kBinStride;
      for (std::uint32_t r : w.rows) {
        HistBin& b = h[col[r]];
        b.g += grad[r];
        b.h += hess[r];
        ++b.n;
      }
    }
  }

  static void subtract(const Work& parent, const Work& small, Work& large) {
    large.hist.resize(parent.hist.size());
    for (std::size_t i = 0; i < parent.hist.size(); ++i) {
      large.hist[i].g = parent.hist[i].g - small.hist[i].g;
      large.hist[i].h = parent.hist[i].h - small.hist[i].h;
      large.hist[i].n = parent.hist[i].n - small.hist[i].n;
    }
  }

  struct Choice {
    std::size_t feature;
    SplitResult split;
  };

  std::optional<Choice> choose(const Work& w) const {
    std::optional<Choice> best;
    for (std::size_t f = 0; f < cols; ++f) {
      if (nbins[f] < 2) continue;
      const auto s = scan_histogram(std::span<const HistBin>(w.hist.data() + f * kBinStride, kBinStride),
                                    nbins[f], cfg.min_samples_leaf, cfg.l2);
      if (s && (!best || s->gain > best->split.gain)) best = Choice{f, *s};
    }
    return best;
  }

  double leaf_value(const Work& w) const {
    double G = 0.0, H = 0.0;
    // Any feature's histogram sums to the node totals; use feature 0.
    for (std::size_t b = 0; b < kBinStride; ++b) {
      G += w.hist[b].g;
      H += w.hist[b].h;
    }
    return -G / (H + cfg.l2);
  }
};

}  // namespace

GbdtModel fit(const FeatureMatrix& x, std::span<const int> labels, const GbdtConfig& cfg,
              FitTrace* trace) {
  cfg.validate();
  if (x.rows == 0 || x.cols() == 0) throw Error("GBDT: empty training data");
  if (x.rows < 2) throw Error("GBDT: need at least 2 rows");
  if (labels.size() != x.rows) throw Error("GBDT: label count does not match rows");
  for (double v : x.values) {
    if (std::isnan(v)) throw Error("GBDT: NaN feature value");
  }
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("GBDT: labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }

  const BinMapper mapper = BinMapper::fit(x, cfg.max_bins);
  Trainer tr{cfg, x.rows, x.cols(), {}, {}, {}, {}};
  tr.binned.resize(x.rows * x.cols());
  tr.nbins.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    tr.nbins[f] = mapper.num_bins(f);
    for (std::size_t r = 0; r < x.rows; ++r) tr.binned[f * x.rows + r] = mapper.bin(f, x.at(r, f));
  }

  GbdtModel model;
  model.config = cfg;
  model.learning_rate = cfg.learning_rate;
  model.feature_names = x.names;
  const double rate = std::clamp(static_cast<double>(positives) / static_cast<double>(x.rows),
                                 cfg.prob_eps, 1.0 - cfg.prob_eps);
  model.base_score = std::log(rate / (1.0 - rate));

  std::vector<double> margin(x.rows, model.base_score);
  if (trace) trace->train_logloss.push_back(logloss(margin, labels));
  tr.grad.resize(x.rows);
  tr.hess.resize(x.rows);
  Rng rng(derive_seed(cfg.seed, 7));
  std::vector<std::uint32_t> leaf_of(x.rows);

  for (std::size_t t = 0; t < cfg.num_trees; ++t) {
    for (std::size_t r = 0; r < x.rows; ++r) {
      const double p = sigmoid(margin[r]);
      tr.grad[r] = p - labels[r];
      tr.hess[r] = p * (1.0 - p);
    }
    Work root;
    root.rows.reserve(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
      if (cfg.subsample >= 1.0 || rng.bernoulli(cfg.subsample)) root.rows.push_back(static_cast<std::uint32_t>(r));
    }
    if (root.rows.empty()) {
      for (std::size_t r = 0; r < x.rows; ++r) root.rows.push_back(static_cast<std::uint32_t>(r));
    }
    tr.build_hist(root);

    Tree tree;
    std::vector<std::uint32_t> split_bin;  // per node, training-time bin threshold
    tree.nodes.emplace_back();
    split_bin.push_back(0);
    std::vector<Work> level;
    level.push_back(std::move(root));
    for (std::size_t depth = 0; depth < cfg.max_depth && !level.empty(); ++depth) {
      std::vector<Work> next;
      for (Work& w : level) {
        const auto choice = tr.choose(w);
        if (!choice) {
          tree.nodes[static_cast<std::size_t>(w.node)].value = tr.leaf_value(w);
          continue;
        }
        const std::size_t f = choice->feature;
        const std::uint32_t b = choice->split.threshold_bin;
        Work left, right;
        const std::uint8_t* col = tr.binned.data() + f * x.rows;
        for (std::uint32_t r : w.rows) (col[r] <= b ? left.rows : right.rows).push_back(r);
        left.node = static_cast<std::int32_t>(tree.nodes.size());
        right.node = left.node + 1;
        TreeNode& n = tree.nodes[static_cast<std::size_t>(w.node)];
        n.feature = static_cast<std::int32_t>(f);
        n.threshold = mapper.upper(f, b);
        n.left = left.node;
        n.right = right.node;
        split_bin[static_cast<std::size_t>(w.node)] = b;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        split_bin.push_back(0);
        split_bin.push_back(0);
        if (left.rows.size() <= right.rows.size()) {
          tr.build_hist(left);
          Trainer::subtract(w, left, right);
        } else {
          tr.build_hist(right);
          Trainer::subtract(w, right, left);
        }
        w.hist.clear();
        w.hist.shrink_to_fit();
        next.push_back(std::move(left));
        next.push_back(std::move(right));
      }
      level = std::move(next);
    }
    for (const Work& w : level) tree.nodes[static_cast<std::size_t>(w.node)].value = tr.leaf_value(w);

    // Route every row (sampled or not) with the training bins.
    for (std::size_t r = 0; r < x.rows; ++r) {
      std::size_t i = 0;
      while (!tree.nodes[i].is_leaf()) {
        const TreeNode& n = tree.nodes[i];
        const std::uint8_t v = tr.binned[static_cast<std::size_t>(n.feature) * x.rows + r];
        i = static_cast<std::size_t>(v <= split_bin[i] ? n.left : n.right);
      }
      leaf_of[r] = static_cast<std::uint32_t>(i);
    }
    // Backtrack each leaf until its rows' loss does not increase.
    std::vector<std::vector<std::uint32_t>> members(tree.nodes.size());
    for (std::size_t r = 0; r < x.rows; ++r) members[leaf_of[r]].push_back(static_cast<std::uint32_t>(r));
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      TreeNode& n = tree.nodes[i];
      if (!n.is_leaf() || members[i].empty()) continue;
      double before = 0.0;
      for (std::uint32_t r : members[i]) before += point_loss(margin[r], labels[r]);
      int halvings = 0;
      for (;;) {
        double after = 0.0;
        const double step = cfg.learning_rate * n.value;
        for (std::uint32_t r : members[i]) after += point_loss(margin[r] + step, labels[r]);
        if (after <= before) break;
        if (++halvings > 60) {
          n.value = 0.0;
          break;
        }
        n.value *= 0.5;
      }
    }
    for (std::size_t r = 0; r < x.rows; ++r) margin[r] += cfg.learning_rate * tree.nodes[leaf_of[r]].value;
    model.trees.push_back(std::move(tree));
    if (trace) trace->train_logloss.push_back(logloss(margin, labels));
  }
  return model;
}

namespace {

void write_tree(std::ostringstream& out, const Tree& t, std::size_t i) {
  const TreeNode& n = t.nodes[i];
  if (n.is_leaf()) {
    out << "L " << csv::format_double(n.value) << '\n';
    return;
  }
  out << "S " << n.feature << ' ' << csv::format_double(n.threshold) << '\n';
  write_tree(out, t, static_cast<std::size_t>(n.left));
  write_tree(out, t, static_cast<std::size_t>(n.right));
}

std::int32_t read_tree(std::istringstream& in, Tree& t, std::size_t depth) {
  if (depth > 64) throw FormatError("model tree too deep");
  std::string tag;
  if (!(in >> tag)) throw FormatError("truncated model tree");
  const auto index = static_cast<std::int32_t>(t.nodes.size());
  t.nodes.emplace_back();
  auto number = [&in]() {
    std::string s;
    if (!(in >> s)) throw FormatError("truncated model tree");
    const auto v = csv::parse_double(s);
    if (!v) throw FormatError("bad number in model: " + s);
    return *v;
  };
  if (tag == "L") {
    t.nodes[static_cast<std::size_t>(index)].value = number();
  } else if (tag == "S") {
    std::int32_t feature = -1;
    if (!(in >> feature) || feature < 0) throw FormatError("bad split feature in model");
    const double threshold = number();
    const std::int32_t left = read_tree(in, t, depth + 1);
    const std::int32_t right = read_tree(in, t, depth + 1);
    TreeNode& n = t.nodes[static_cast<std::size_t>(index)];
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
  } else {
    throw FormatError("unknown tree node tag '" + tag + "'");
  }
  return index;
}

}  // namespace

std::string GbdtModel::to_text() const {
  std::ostringstream out;
  out << "tlp-gbdt 1\n";
  out << "num_trees " << config.num_trees << '\n';
  out << "max_depth " << config.max_depth << '\n';
  out << "learning_rate " << csv::format_double(config.learning_rate) << '\n';
  out << "min_samples_leaf " << config.min_samples_leaf << '\n';
  out << "max_bins " << config.max_bins << '\n';
  out << "seed " << config.seed << '\n';
  out << "subsample " << csv::format_double(config.subsample) << '\n';
  out << "l2 " << csv::format_double(config.l2) << '\n';
  out << "prob_eps " << csv::format_double(config.prob_eps) << '\n';
  out << "base_score " << csv::format_double(base_score) << '\n';
  out << "features " << feature_names.size();
  for (const auto& n : feature_names) out << ' ' << n;
  out << '\n';
  out << "trees " << trees.size() << '\n';
  for (std::size_t i = 0; i < trees.size(); ++i) {
    out << "tree " << i << '\n';
    write_tree(out, trees[i], 0);
  }
  out << "end\n";
  return out.str();
}

GbdtModel GbdtModel::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "tlp-gbdt") throw FormatError("not a tlp-gbdt model");
  if (version != 1) throw FormatError("unsupported model version " + std::to_string(version));
  GbdtModel m;
  auto expect = [&in](const char* key) {
    std::string k;
    if (!(in >> k) || k != key) throw FormatError(std::string("model: expected '") + key + "'");
  };
  auto number = [&in]() {
    std::string s;
    if (!(in >> s)) throw FormatError("truncated model");
    const auto v = csv::parse_double(s);
    if (!v) throw FormatError("bad number in model: " + s);
    return *v;
  };
  expect("num_trees");
  in >> m.config.num_trees;
  expect("max_depth");
  in >> m.config.max_depth;
  expect("learning_rate");
  m.config.learning_rate = number();
  expect("min_samples_leaf");
  in >> m.config.min_samples_leaf;
  expect("max_bins");
  in >> m.config.max_bins;
  expect("seed");
  in >> m.config.seed;
  expect("subsample");
  m.config.subsample = number();
  expect("l2");
  m.config.l2 = number();
  expect("prob_eps");
  m.config.prob_eps = number();
  expect("base_score");
  m.base_score = number();
  m.learning_rate = m.config.learning_rate;
  expect("features");
  std::size_t nf = 0;
  in >> nf;
  m.feature_names.resize(nf);
  for (auto& n : m.feature_names) in >> n;
  expect("trees");
  std::size_t nt = 0;
  in >> nt;
  if (!in) throw FormatError("truncated model header");
  for (std::size_t i = 0; i < nt; ++i) {
    expect("tree");
    std::size_t idx = 0;
    in >> idx;
    Tree t;
    read_tree(in, t, 0);
    for (const auto& n : t.nodes) {
      if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= nf) {
        throw FormatError("split feature index out of range");
      }
    }
    m.trees.push_back(std::move(t));
  }
  expect("end");
  return m;
}

void GbdtModel::save(const std::filesystem::path& path) const {
  for (const auto& n : feature_names) {
    if (n.empty() || n.find_first_of(" \t\n") != std::string::npos) {
      throw Error("feature names must be non-empty and free of whitespace");
    }
  }
  std::ofstream out = csv::open_output(path);
  out << to_text();
  if (!out) throw Error("failed writing model: " + path.string());
}

GbdtModel GbdtModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace tlp::gbdt
