#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakery/eval/metrics.hpp"

namespace fakery {

struct ThresholdResult {
  double tau_star = 0.5;
  double val_f1 = 0.0;
  std::size_t candidates_evaluated = 0;
};

// Picks the F1-maximizing threshold over {unique p} U {0, 1}. Ties prefer the
// higher balanced accuracy, then the smaller threshold.
//
// Candidates are visited in ascending order with the confusion counts swept
// incrementally, so every candidate is scored from exact integer counts.
inline ThresholdResult tune_threshold(std::span<const Label> y, std::span<const double> p) {
  detail::require_same_length(y.size(), p.size(), "tune_threshold");
  std::uint64_t pos = 0;
  for (auto l : y) pos += l;
  if (pos == 0 || pos == y.size()) throw SingleClassError("tune_threshold: both classes required");

  std::vector<double> candidates(p.begin(), p.end());
  candidates.push_back(0.0);
  candidates.push_back(1.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  // At threshold t, samples with p < t are negative predictions.
  ConfusionCounts c{pos, y.size() - pos, 0, 0};
  std::size_t k = 0;
  ThresholdResult best;
  double best_bal = -1.0;
  bool have = false;
  for (double t : candidates) {
    while (k < order.size() && p[order[k]] < t) {
      if (y[order[k]]) {
        --c.tp;
        ++c.fn;
      } else {
        --c.fp;
        ++c.tn;
      }
      ++k;
    }
    const auto m = threshold_metrics(c);
    if (!have || m.f1 > best.val_f1 || (m.f1 == best.val_f1 && m.balanced_accuracy > best_bal)) {
      best.tau_star = t;
      best.val_f1 = m.f1;
      best_bal = m.balanced_accuracy;
      have = true;
    }
  }
  best.candidates_evaluated = candidates.size();
  return best;
}

inline nlohmann::json to_json(const ThresholdResult& t) {
  return {{"tau_star", t.tau_star}, {"val_f1", t.val_f1}, {"candidates_evaluated", t.candidates_evaluated}};
}

inline ThresholdResult threshold_from_json(const nlohmann::json& j) {
  return {j.at("tau_star").get<double>(), j.at("val_f1").get<double>(),
          j.at("candidates_evaluated").get<std::size_t>()};
}

}  // namespace fakery
