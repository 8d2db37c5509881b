#pragma once

// Ranking, thresholded and calibration metrics for binary classifiers.
// Any ratio whose denominator is zero is reported as 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakery/error.hpp"
#include "fakery/image.hpp"
#include "fakery/models/rank.hpp"

namespace fakery {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ThresholdMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double balanced_accuracy = 0.0;
  double mcc = 0.0;
};

struct MetricsReport {
  double pr_auc = 0.0;
  double roc_auc = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double balanced_accuracy = 0.0;
  double brier = 0.0;
  double tau = 0.5;
  ConfusionCounts counts;
};

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b, const char* who) {
  if (a != b || a == 0)
    throw LengthMismatchError(std::string(who) + ": " + std::to_string(a) + " labels vs " +
                              std::to_string(b) + " scores");
}

inline double ratio(double num, double den) noexcept { return den == 0.0 ? 0.0 : num / den; }

}  // namespace detail

// Predicted positive iff p >= tau.
inline ConfusionCounts confusion(std::span<const Label> y, std::span<const double> p, double tau) {
  detail::require_same_length(y.size(), p.size(), "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pred = p[i] >= tau;
    if (y[i]) {
      pred ? ++c.tp : ++c.fn;
    } else {
      pred ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

inline ThresholdMetrics threshold_metrics(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  ThresholdMetrics m;
  m.precision = detail::ratio(tp, tp + fp);
  m.recall = detail::ratio(tp, tp + fn);
  m.f1 = detail::ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  const double tnr = detail::ratio(tn, tn + fp);
  m.balanced_accuracy = (m.recall + tnr) / 2.0;
  const double den = std::sqrt((tp + fp) * (tp + fn)) * std::sqrt((tn + fp) * (tn + fn));
  m.mcc = detail::ratio(tp * tn - fp * fn, den);
  return m;
}

inline double brier(std::span<const Label> y, std::span<const double> p) {
  detail::require_same_length(y.size(), p.size(), "brier");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = p[i] - static_cast<double>(y[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(y.size());
}

// Mann-Whitney statistic with average ranks for ties.
inline double roc_auc(std::span<const Label> y, std::span<const double> p) {
  detail::require_same_length(y.size(), p.size(), "roc_auc");
  const auto ranks = average_ranks(p);
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i]) {
      pos += 1.0;
      rank_sum += ranks[i];
    }
  const double neg = static_cast<double>(y.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw SingleClassError("roc_auc: both classes required");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

// Average precision: walk scores in descending order, one step per group of
// tied scores, adding (recall gained) x (precision at the end of the group).
inline double pr_auc(std::span<const Label> y, std::span<const double> p) {
  detail::require_same_length(y.size(), p.size(), "pr_auc");
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  double total_pos = 0.0;
  for (auto l : y) total_pos += l;
  if (total_pos == 0.0) throw NoPositivesError("pr_auc: no positive labels");
  double ap = 0.0, tp = 0.0, seen = 0.0;
  for (std::size_t i = 0; i < n;) {
    double group_tp = 0.0;
    std::size_t j = i;
    while (j < n && p[order[j]] == p[order[i]]) {
      group_tp += y[order[j]];
      ++j;
    }
    tp += group_tp;
    seen += static_cast<double>(j - i);
    ap += (group_tp / total_pos) * (tp / seen);
    i = j;
  }
  return ap;
}

inline MetricsReport evaluate(std::span<const Label> y, std::span<const double> p, double tau) {
  detail::require_same_length(y.size(), p.size(), "evaluate");
  MetricsReport r;
  r.roc_auc = roc_auc(y, p);  // throws SingleClassError first
  r.pr_auc = pr_auc(y, p);
  r.counts = confusion(y, p, tau);
  const auto m = threshold_metrics(r.counts);
  r.f1 = m.f1;
  r.mcc = m.mcc;
  r.balanced_accuracy = m.balanced_accuracy;
  r.brier = brier(y, p);
  r.tau = tau;
  return r;
}

// Column names follow the report tables in lower_snake_case.
inline nlohmann::json to_json(const MetricsReport& r) {
  return {{"pr_auc", r.pr_auc},
          {"roc_auc", r.roc_auc},
          {"f1", r.f1},
          {"mcc", r.mcc},
          {"bal_acc", r.balanced_accuracy},
          {"brier", r.brier},
          {"tau", r.tau},
          {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}}};
}

inline MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.pr_auc = j.at("pr_auc").get<double>();
  r.roc_auc = j.at("roc_auc").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.mcc = j.at("mcc").get<double>();
  r.balanced_accuracy = j.at("bal_acc").get<double>();
  r.brier = j.at("brier").get<double>();
  r.tau = j.at("tau").get<double>();
  const auto& c = j.at("counts");
  r.counts = {c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(),
              c.at("tn").get<std::uint64_t>(), c.at("fn").get<std::uint64_t>()};
  return r;
}

}  // namespace fakery
