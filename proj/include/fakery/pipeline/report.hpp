#pragma once

// Result tables in the layout of the per-feature-set comparison tables, a
// long-format CSV for plotting, and a regime-trend summary.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fakery/eval/metrics.hpp"
#include "fakery/pipeline/config.hpp"

namespace fakery {

struct ResultRow {
  std::string model;
  std::string spec;
  MetricsReport metrics;
};

struct MetricColumn {
  const char* title;
  double MetricsReport::*field;
  bool lower_is_better;
};

inline constexpr std::array<MetricColumn, 6> kMetricColumns{{
    {"PR-AUC", &MetricsReport::pr_auc, false},
    {"ROC-AUC", &MetricsReport::roc_auc, false},
    {"F1", &MetricsReport::f1, false},
    {"MCC", &MetricsReport::mcc, false},
    {"BalAcc", &MetricsReport::balanced_accuracy, false},
    {"Brier", &MetricsReport::brier, true},
}};

inline std::string format_fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Sort key: presets first in regime order, then other tags alphabetically.
inline int spec_rank(const std::string& spec) {
  if (spec == "baseline") return 0;
  if (spec == "advanced") return 1;
  if (spec == "mixed") return 2;
  return 3;
}

inline int model_rank(const std::string& model) {
  const auto it = std::find(kModelNames.begin(), kModelNames.end(), model);
  return static_cast<int>(it - kModelNames.begin());
}

inline void sort_results(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const auto ka = std::tuple(spec_rank(a.spec), a.spec, model_rank(a.model), a.model);
    const auto kb = std::tuple(spec_rank(b.spec), b.spec, model_rank(b.model), b.model);
    return ka < kb;
  });
}

inline std::vector<const ResultRow*> rows_for_spec(const std::vector<ResultRow>& rows,
                                                   const std::string& spec) {
  std::vector<const ResultRow*> out;
  for (const auto& r : rows)
    if (r.spec == spec) out.push_back(&r);
  return out;
}

// Markdown table for one feature set. The best value per column is bold
// (rendered at 4 decimals, ties all bold).
inline std::string markdown_table(const std::vector<ResultRow>& rows, const std::string& spec) {
  const auto sel = rows_for_spec(rows, spec);
  std::array<double, kMetricColumns.size()> best{};
  for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
    const auto& col = kMetricColumns[k];
    best[k] = col.lower_is_better ? 1e300 : -1e300;
    for (const auto* r : sel) {
      const double v = std::stod(format_fixed(r->metrics.*col.field));
      best[k] = col.lower_is_better ? std::min(best[k], v) : std::max(best[k], v);
    }
  }
  std::string out = "Feature set: " + spec + "\n\n| Model |";
  for (const auto& c : kMetricColumns) out += std::string(" ") + c.title + " |";
  out += "\n|---|";
  for (std::size_t k = 0; k < kMetricColumns.size(); ++k) out += "---|";
  out += "\n";
  for (const auto* r : sel) {
    out += "| " + r->model + " |";
    for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
      const std::string cell = format_fixed(r->metrics.*kMetricColumns[k].field);
      out += std::stod(cell) == best[k] ? " **" + cell + "** |" : " " + cell + " |";
    }
    out += "\n";
  }
  return out;
}

inline std::string csv_table(const std::vector<ResultRow>& rows, const std::string& spec) {
  std::string out = "model";
  for (const auto& c : kMetricColumns) out += std::string(",") + c.title;
  out += "\n";
  for (const auto* r : rows_for_spec(rows, spec)) {
    out += r->model;
    for (const auto& c : kMetricColumns) out += "," + format_exact(r->metrics.*c.field);
    out += "\n";
  }
  return out;
}

// model,spec,metric,value: one line per (model, spec, metric).
inline std::string long_csv(const std::vector<ResultRow>& rows) {
  std::string out = "model,spec,metric,value\n";
  for (const auto& r : rows)
    for (const auto& c : kMetricColumns)
      out += r.model + "," + r.spec + "," + c.title + "," + format_exact(r.metrics.*c.field) + "\n";
  return out;
}

// Balanced accuracy per model across baseline/advanced/mixed, flagging
// whether it is non-decreasing in that order. Models missing a regime are
// reported with blanks and no flag.
inline std::string trend_csv(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::array<std::optional<double>, 3>> by_model;
  for (const auto& r : rows) {
    const int k = spec_rank(r.spec);
    if (k < 3) by_model[r.model][static_cast<std::size_t>(k)] = r.metrics.balanced_accuracy;
  }
  std::vector<std::string> models;
  for (const auto& [m, _] : by_model) models.push_back(m);
  std::sort(models.begin(), models.end(),
            [](const auto& a, const auto& b) { return std::pair(model_rank(a), a) < std::pair(model_rank(b), b); });
  std::string out = "model,baseline,advanced,mixed,monotone\n";
  for (const auto& m : models) {
    const auto& v = by_model[m];
    out += m;
    for (const auto& x : v) out += "," + (x ? format_exact(*x) : std::string());
    if (v[0] && v[1] && v[2])
      out += (*v[0] <= *v[1] && *v[1] <= *v[2]) ? ",yes" : ",no";
    else
      out += ",";
    out += "\n";
  }
  return out;
}

}  // namespace fakery
