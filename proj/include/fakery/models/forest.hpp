#pragma once

// Random forest and extremely randomized trees for binary classification,
// split by Gini impurity. Leaves hold the class-1 frequency of the training
// rows that reached them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fakery/matrix.hpp"
#include "fakery/models/common.hpp"
#include "fakery/models/tree.hpp"
#include "fakery/random.hpp"

namespace fakery {

enum class ForestMode : std::uint8_t { random_forest, extra_trees };

struct ForestParams {
  ForestMode mode = ForestMode::random_forest;
  std::size_t n_trees = 500;
  std::uint64_t seed = 42;
  // 0 selects floor(sqrt(d)).
  std::size_t max_features = 0;
};

struct ForestModel {
  ForestParams params;
  std::size_t n_features = 0;
  std::vector<Tree> trees;

  std::size_t dimension() const noexcept { return n_features; }

  template <class T>
  double predict_row(std::span<const T> x) const {
    double acc = 0.0;
    for (const auto& t : trees) acc += t.predict(x);
    return acc / static_cast<double>(trees.size());
  }

  template <class T>
  std::vector<double> predict_proba(const BasicMatrix<T>& x) const {
    require_dimension(x.cols(), dimension(), "forest");
    std::vector<double> p(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) p[r] = predict_row(x.row(r));
    return p;
  }
};

namespace detail {

struct SplitChoice {
  bool valid = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini, lower is better

  // Lower impurity wins; ties go to the lower feature index, then the lower
  // threshold.
  bool better_than(const SplitChoice& o) const noexcept {
    if (!o.valid) return true;
    if (impurity != o.impurity) return impurity < o.impurity;
    if (feature != o.feature) return feature < o.feature;
    return threshold < o.threshold;
  }
};

// n * Gini for a child with `pos` positives out of `n`.
inline double weighted_gini(double pos, double n) noexcept {
  if (n == 0.0) return 0.0;
  const double q = pos / n;
  return n * 2.0 * q * (1.0 - q);
}

template <class T>
class TreeBuilder {
 public:
  TreeBuilder(const BasicMatrix<T>& x, std::span<const Label> y, ForestMode mode,
              std::size_t max_features, SplitMix64& rng)
      : x_(x), y_(y), mode_(mode), max_features_(max_features), rng_(rng),
        features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  Tree build(std::vector<std::size_t> rows) {
    Tree tree;
    grow(tree, rows, 0, rows.size());
    return tree;
  }

 private:
  std::uint32_t grow(Tree& tree, std::vector<std::size_t>& rows, std::size_t begin,
                     std::size_t end) {
    const auto id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::size_t pos = 0;
    for (std::size_t i = begin; i < end; ++i) pos += y_[rows[i]];
    const std::size_t n = end - begin;
    tree.nodes[id].value = static_cast<double>(pos) / static_cast<double>(n);
    if (n < 2 || pos == 0 || pos == n) return id;

    const SplitChoice best = find_split(rows, begin, end, pos);
    if (!best.valid) return id;

    const auto mid_it = std::partition(
        rows.begin() + static_cast<std::ptrdiff_t>(begin), rows.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return static_cast<double>(x_(r, best.feature)) <= best.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
    tree.nodes[id].feature = static_cast<std::int32_t>(best.feature);
    tree.nodes[id].threshold = best.threshold;
    const auto l = grow(tree, rows, begin, mid);
    const auto r = grow(tree, rows, mid, end);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  // Visits features in random order until max_features non-constant ones have
  // been evaluated, or every feature has been tried.
  SplitChoice find_split(const std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                         std::size_t pos) {
    SplitChoice best;
    std::size_t evaluated = 0;
    const std::size_t d = features_.size();
    for (std::size_t k = 0; k < d && evaluated < max_features_; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng_.below(d - k));
      std::swap(features_[k], features_[j]);
      const std::size_t f = features_[k];
      SplitChoice cand = mode_ == ForestMode::random_forest
                             ? best_threshold(rows, begin, end, pos, f)
                             : random_threshold(rows, begin, end, pos, f);
      if (!cand.valid) continue;
      ++evaluated;
      if (cand.better_than(best)) best = cand;
    }
    return best;
  }

  SplitChoice best_threshold(const std::vector<std::size_t>& rows, std::size_t begin,
                             std::size_t end, std::size_t pos, std::size_t f) {
    values_.clear();
    for (std::size_t i = begin; i < end; ++i)
      values_.push_back({static_cast<double>(x_(rows[i], f)), y_[rows[i]]});
    std::sort(values_.begin(), values_.end());
    SplitChoice best;
    if (values_.front().first == values_.back().first) return best;
    const double n = static_cast<double>(values_.size());
    const double total_pos = static_cast<double>(pos);
    double left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      left_pos += values_[i].second;
      if (values_[i].first == values_[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      SplitChoice cand;
      cand.valid = true;
      cand.feature = f;
      cand.threshold = values_[i].first + (values_[i + 1].first - values_[i].first) / 2.0;
      if (!(cand.threshold < values_[i + 1].first)) cand.threshold = values_[i].first;
      cand.impurity = weighted_gini(left_pos, nl) + weighted_gini(total_pos - left_pos, n - nl);
      if (cand.better_than(best)) best = cand;
    }
    return best;
  }

  SplitChoice random_threshold(const std::vector<std::size_t>& rows, std::size_t begin,
                               std::size_t end, std::size_t pos, std::size_t f) {
    double lo = static_cast<double>(x_(rows[begin], f)), hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = static_cast<double>(x_(rows[i], f));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    SplitChoice cand;
    if (lo == hi) return cand;
    double thr = lo + rng_.uniform() * (hi - lo);
    if (!(thr < hi)) thr = lo;
    double nl = 0.0, left_pos = 0.0;
    for (std::size_t i = begin; i < end; ++i)
      if (static_cast<double>(x_(rows[i], f)) <= thr) {
        nl += 1.0;
        left_pos += y_[rows[i]];
      }
    const double n = static_cast<double>(end - begin);
    cand.valid = true;
    cand.feature = f;
    cand.threshold = thr;
    cand.impurity = weighted_gini(left_pos, nl) +
                    weighted_gini(static_cast<double>(pos) - left_pos, n - nl);
    return cand;
  }

  const BasicMatrix<T>& x_;
  std::span<const Label> y_;
  ForestMode mode_;
  std::size_t max_features_;
  SplitMix64& rng_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, Label>> values_;
};

}  // namespace detail

inline std::size_t resolve_max_features(std::size_t requested, std::size_t d) {
  if (requested != 0) return std::min(requested, d);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
}

// Random forest: bootstrap rows per tree, exhaustive Gini threshold search.
// Extra trees: all rows, one uniform threshold per candidate feature. Trees
// grow until pure or fewer than 2 rows. Tree t draws from its own SplitMix64
// stream derived from (seed, t).
template <class T>
ForestModel forest_fit(const BasicMatrix<T>& x, std::span<const Label> y,
                       const ForestParams& params = {}) {
  if (x.rows() != y.size()) throw LengthMismatchError("forest: rows and labels differ");
  require_both_classes(y, "forest");
  ForestModel model;
  model.params = params;
  model.n_features = x.cols();
  const std::size_t n = x.rows();
  const std::size_t max_features = resolve_max_features(params.max_features, x.cols());
  model.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    SplitMix64 rng(derive_seed(params.seed, t));
    std::vector<std::size_t> rows(n);
    if (params.mode == ForestMode::random_forest) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    detail::TreeBuilder<T> builder(x, y, params.mode, max_features, rng);
    model.trees.push_back(builder.build(std::move(rows)));
  }
  return model;
}

}  // namespace fakery
