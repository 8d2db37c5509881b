#pragma once

// Histogram gradient-boosted trees for binary log-loss.
//
// Features are bucketed once by training-set quantiles. Each round fits a
// regression tree to the gradient/hessian of the log-loss at the current
// raw scores, using second-order gain and leaf values, and adds the tree
// scaled by the learning rate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fakery/matrix.hpp"
#include "fakery/models/common.hpp"
#include "fakery/models/tree.hpp"

namespace fakery {

enum class Growth : std::uint8_t { leaf_wise, level_wise };

struct GbdtParams {
  std::size_t n_trees = 500;
  double learning_rate = 0.05;
  Growth growth = Growth::leaf_wise;
  std::size_t max_leaves = 31;  // leaf_wise
  std::size_t max_depth = 6;    // level_wise
  double l2_lambda = 1.0;
  double min_child_weight = 1.0;
  std::size_t n_bins = 255;

  static GbdtParams leaf_wise_defaults() { return {}; }
  static GbdtParams level_wise_defaults() {
    GbdtParams p;
    p.growth = Growth::level_wise;
    return p;
  }
};

struct GbdtModel {
  GbdtParams params;
  std::size_t n_features = 0;
  double base_score = 0.0;  // prior log-odds
  std::vector<Tree> trees;
  std::vector<std::vector<double>> bin_edges;  // per feature, ascending
  std::vector<double> train_loss;              // after each round, not persisted

  std::size_t dimension() const noexcept { return n_features; }

  template <class T>
  double raw_score(std::span<const T> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(x);
    return base_score + params.learning_rate * sum;
  }

  template <class T>
  std::vector<double> predict_proba(const BasicMatrix<T>& x) const {
    require_dimension(x.cols(), dimension(), "gbdt");
    std::vector<double> p(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) p[r] = sigmoid(raw_score(x.row(r)));
    return p;
  }
};

// Children's share of the regularized second-order objective,
// G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda), folded over one division.
inline double split_score(double gl, double hl, double gr, double hr, double lambda) noexcept {
  const double dl = hl + lambda, dr = hr + lambda;
  return (gl * gl * dr + gr * gr * dl) / (dl * dr);
}

// Half the improvement in the regularized second-order objective from
// splitting a node into (G_L, H_L) and (G_R, H_R).
inline double split_gain(double gl, double hl, double gr, double hr, double lambda) noexcept {
  const double g = gl + gr, h = hl + hr;
  return 0.5 * (split_score(gl, hl, gr, hr, lambda) - g * g / (h + lambda));
}

inline double leaf_weight(double g, double h, double lambda) noexcept { return -g / (h + lambda); }

// Quantile bin edges for one column. Rows with x <= edges[b] land in bins
// 0..b; at most n_bins bins result. Duplicate edges are collapsed, and
// columns with few distinct values split at midpoints between them.
inline std::vector<double> quantile_edges(std::vector<double> values, std::size_t n_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  for (double v : values)
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
  std::vector<double> edges;
  if (distinct.size() <= 1) return edges;
  if (distinct.size() <= n_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      double mid = distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0;
      if (!(mid < distinct[i + 1])) mid = distinct[i];
      edges.push_back(mid);
    }
    return edges;
  }
  const std::size_t n = values.size();
  for (std::size_t k = 1; k < n_bins; ++k) {
    const double q = values[std::min(n - 1, k * n / n_bins)];
    if (q >= distinct.back()) break;
    if (edges.empty() || q > edges.back()) edges.push_back(q);
  }
  return edges;
}

inline std::uint8_t bin_of(std::span<const double> edges, double x) noexcept {
  return static_cast<std::uint8_t>(std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
}

namespace detail {

struct GradPair {
  double g = 0.0;
  double h = 0.0;
};

struct BinnedData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bins;     // column-major: bins[f * rows + r]
  std::vector<std::size_t> offsets;   // histogram offset per feature, plus total

  const std::uint8_t* column(std::size_t f) const { return bins.data() + f * rows; }
};

struct LeafSplit {
  bool valid = false;
  double gain = 0.0;
  std::size_t feature = 0;
  std::size_t bin = 0;
};

struct OpenLeaf {
  std::uint32_t node = 0;
  std::size_t depth = 0;
  std::vector<std::uint32_t> rows;
  GradPair total;
  std::vector<GradPair> hist;
  LeafSplit split;
};

// Grows one regression tree on binned data. Histograms are handled one
// feature at a time: the smaller child's segment is accumulated, the larger
// child's is the parent's minus it, and both are scanned for splits while
// the segment is still in cache.
class HistTreeGrower {
 public:
  HistTreeGrower(const BinnedData& data, const std::vector<std::vector<double>>& edges,
                 const GbdtParams& params)
      : data_(data), edges_(edges), params_(params) {}

  // Grows one tree; leaf_of[i] receives the node each row ends in.
  Tree grow(std::span<const GradPair> gh, std::vector<std::uint32_t>& leaf_of) {
    gh_ = gh;
    Tree tree;
    std::vector<OpenLeaf> open;
    OpenLeaf root;
    root.rows.resize(data_.rows);
    for (std::uint32_t i = 0; i < data_.rows; ++i) root.rows[i] = i;
    for (auto r : root.rows) {
      root.total.g += gh_[r].g;
      root.total.h += gh_[r].h;
    }
    tree.nodes.emplace_back();
    if (splittable(root)) {
      root.hist = acquire();
      for (std::size_t f = 0; f < data_.cols; ++f) {
        accumulate(root.hist, root.rows, f);
        scan(root, f);
      }
    }
    std::vector<OpenLeaf> closed;
    settle(std::move(root), open, closed);

    std::size_t leaves = 1;
    while (true) {
      const auto pick = choose(open);
      if (!pick) break;
      if (params_.growth == Growth::leaf_wise && leaves >= params_.max_leaves) break;
      OpenLeaf parent = std::move(open[*pick]);
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(*pick));
      ++leaves;
      // Children of the last permitted split stay leaves whatever their gain.
      const bool last = params_.growth == Growth::leaf_wise && leaves >= params_.max_leaves;
      auto [left, right] = split(tree, parent, !last);
      settle(std::move(left), open, closed);
      settle(std::move(right), open, closed);
    }
    for (auto& leaf : open) closed.push_back(std::move(leaf));
    for (auto& leaf : closed) {
      tree.nodes[leaf.node].value = leaf_weight(leaf.total.g, leaf.total.h, params_.l2_lambda);
      for (auto r : leaf.rows) leaf_of[r] = leaf.node;
      release(std::move(leaf.hist));
    }
    return tree;
  }

 private:
  // Histograms are large (one cell per feature bin), so buffers are recycled
  // across leaves and trees instead of reallocated. Segments are zeroed by
  // their first writer, not here.
  std::vector<GradPair> acquire() {
    if (pool_.empty()) return std::vector<GradPair>(data_.offsets.back());
    auto buf = std::move(pool_.back());
    pool_.pop_back();
    return buf;
  }

  void release(std::vector<GradPair>&& buf) {
    if (!buf.empty()) pool_.push_back(std::move(buf));
    buf = {};
  }

  // Overwrites feature f's segment of `hist` with the sums over `rows`.
  void accumulate(std::vector<GradPair>& hist, std::span<const std::uint32_t> rows, std::size_t f) const {
    GradPair* seg = hist.data() + data_.offsets[f];
    std::fill(seg, hist.data() + data_.offsets[f + 1], GradPair{});
    const std::uint8_t* col = data_.column(f);
    for (auto r : rows) {
      GradPair& cell = seg[col[r]];
      cell.g += gh_[r].g;
      cell.h += gh_[r].h;
    }
  }

  bool may_split(const OpenLeaf& leaf) const {
    return params_.growth != Growth::level_wise || leaf.depth < params_.max_depth;
  }

  bool splittable(const OpenLeaf& leaf) const { return may_split(leaf) && leaf.rows.size() >= 2; }

  // Updates leaf.split with the best strictly positive gain on feature f.
  // Features are scanned in ascending order and only a strictly larger gain
  // replaces the incumbent, so ties resolve to the lowest feature, then the
  // lowest bin.
  void scan(OpenLeaf& leaf, std::size_t f) const {
    const double lambda = params_.l2_lambda, mcw = params_.min_child_weight;
    const std::size_t lo = data_.offsets[f], hi = data_.offsets[f + 1];
    auto& best = leaf.split;
    const double parent = leaf.total.g * leaf.total.g / (leaf.total.h + lambda);
    double gl = 0.0, hl = 0.0;
    for (std::size_t b = lo; b + 1 < hi; ++b) {
      gl += leaf.hist[b].g;
      hl += leaf.hist[b].h;
      const double gr = leaf.total.g - gl, hr = leaf.total.h - hl;
      const double gain = 0.5 * (split_score(gl, hl, gr, hr, lambda) - parent);
      if (hl >= mcw && hr >= mcw && gain > 0.0 && (!best.valid || gain > best.gain)) best = {true, gain, f, b - lo};
    }
  }

  void settle(OpenLeaf&& leaf, std::vector<OpenLeaf>& open, std::vector<OpenLeaf>& closed) {
    if (leaf.split.valid) {
      open.push_back(std::move(leaf));
    } else {
      release(std::move(leaf.hist));
      closed.push_back(std::move(leaf));
    }
  }

  // Leaf-wise takes the largest gain; level-wise the shallowest leaf. Ties go
  // to the lower node id.
  std::optional<std::size_t> choose(const std::vector<OpenLeaf>& open) const {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (!open[i].split.valid) continue;
      if (!pick) {
        pick = i;
        continue;
      }
      const auto& a = open[i];
      const auto& b = open[*pick];
      const bool better = params_.growth == Growth::leaf_wise
                              ? (a.split.gain > b.split.gain ||
                                 (a.split.gain == b.split.gain && a.node < b.node))
                              : (a.depth < b.depth || (a.depth == b.depth && a.node < b.node));
      if (better) pick = i;
    }
    return pick;
  }

  std::pair<OpenLeaf, OpenLeaf> split(Tree& tree, OpenLeaf& parent, bool grow_further) {
    const auto [valid, gain, f, bin] = parent.split;
    const std::uint8_t* col = data_.column(f);
    OpenLeaf left, right;
    for (auto r : parent.rows) {
      auto& side = col[r] <= bin ? left : right;
      side.rows.push_back(r);
      side.total.g += gh_[r].g;
      side.total.h += gh_[r].h;
    }
    left.depth = right.depth = parent.depth + 1;
    left.node = static_cast<std::uint32_t>(tree.nodes.size());
    right.node = left.node + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[parent.node];
    node.feature = static_cast<std::int32_t>(f);
    node.threshold = edges_[f][bin];
    node.left = left.node;
    node.right = right.node;

    const bool scan_left = grow_further && splittable(left);
    const bool scan_right = grow_further && splittable(right);
    if (!scan_left && !scan_right) {
      release(std::move(parent.hist));
      return {std::move(left), std::move(right)};
    }
    // Histogram subtraction: build the smaller child, derive the larger.
    const bool left_small = left.rows.size() <= right.rows.size();
    OpenLeaf& small = left_small ? left : right;
    OpenLeaf& large = left_small ? right : left;
    const bool scan_small = left_small ? scan_left : scan_right;
    const bool scan_large = left_small ? scan_right : scan_left;
    small.hist = acquire();
    large.hist = std::move(parent.hist);
    for (std::size_t k = 0; k < data_.cols; ++k) {
      accumulate(small.hist, small.rows, k);
      const std::size_t lo = data_.offsets[k], hi = data_.offsets[k + 1];
      for (std::size_t b = lo; b < hi; ++b) {
        large.hist[b].g -= small.hist[b].g;
        large.hist[b].h -= small.hist[b].h;
      }
      if (scan_small) scan(small, k);
      if (scan_large) scan(large, k);
    }
    return {std::move(left), std::move(right)};
  }

  const BinnedData& data_;
  const std::vector<std::vector<double>>& edges_;
  const GbdtParams& params_;
  std::span<const GradPair> gh_;
  std::vector<std::vector<GradPair>> pool_;
};

}  // namespace detail

template <class T>
GbdtModel gbdt_fit(const BasicMatrix<T>& x, std::span<const Label> y, const GbdtParams& params = {}) {
  if (x.rows() != y.size()) throw LengthMismatchError("gbdt: rows and labels differ");
  require_both_classes(y, "gbdt");
  if (params.n_bins < 2 || params.n_bins > 255) throw ConfigError("gbdt: n_bins must be in [2, 255]");
  const std::size_t n = x.rows(), d = x.cols();
  GbdtModel model;
  model.params = params;
  model.n_features = d;

  detail::BinnedData data;
  data.rows = n;
  data.cols = d;
  data.bins.resize(n * d);
  data.offsets.assign(d + 1, 0);
  model.bin_edges.resize(d);
  std::vector<double> column(n);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t r = 0; r < n; ++r) column[r] = static_cast<double>(x(r, f));
    model.bin_edges[f] = quantile_edges(column, params.n_bins);
    for (std::size_t r = 0; r < n; ++r) data.bins[f * n + r] = bin_of(model.bin_edges[f], column[r]);
    data.offsets[f + 1] = data.offsets[f] + model.bin_edges[f].size() + 1;
  }

  double positives = 0.0;
  for (auto l : y) positives += l;
  const double prior = positives / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<double> raw(n, model.base_score), p(n);
  std::vector<detail::GradPair> gh(n);
  std::vector<std::uint32_t> leaf_of(n);
  detail::HistTreeGrower grower(data, model.bin_edges, model.params);
  model.trees.reserve(params.n_trees);
  for (std::size_t round = 0; round < params.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(raw[i]);
      gh[i] = {p[i] - static_cast<double>(y[i]), p[i] * (1.0 - p[i])};
    }
    Tree tree = grower.grow(gh, leaf_of);
    for (std::size_t i = 0; i < n; ++i) raw[i] += params.learning_rate * tree.nodes[leaf_of[i]].value;
    tree.to_preorder();
    model.trees.push_back(std::move(tree));
    for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(raw[i]);
    model.train_loss.push_back(log_loss(y, p));
  }
  return model;
}

}  // namespace fakery
