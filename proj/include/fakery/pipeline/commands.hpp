#pragma once

// The extract -> train -> evaluate -> report pipeline.
//
// Layout under the output directory:
//   manifest.json                          config echo, timestamps, cache checksums
//   cache/{train,test}/<spec>.hffx         feature caches
//   runs/<spec>/<model>/model.json         fitted model
//   runs/<spec>/<model>/threshold.json     tuned threshold and validation F1
//   runs/<spec>/<model>/metrics.json       test metrics at that threshold
//   report/table_<spec>.{md,csv}, report/metrics_long.csv, report/trend.csv

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakery/cache.hpp"
#include "fakery/dataset.hpp"
#include "fakery/eval.hpp"
#include "fakery/features.hpp"
#include "fakery/models.hpp"
#include "fakery/pipeline/checksum.hpp"
#include "fakery/pipeline/config.hpp"
#include "fakery/pipeline/report.hpp"

namespace fakery {

namespace fs = std::filesystem;

inline fs::path cache_path(const RunConfig& c, std::string_view split, const std::string& tag) {
  return c.out_dir / "cache" / std::string(split) / (tag + ".hffx");
}

inline fs::path run_dir(const RunConfig& c, const std::string& tag, const std::string& model) {
  return c.out_dir / "runs" / tag / model;
}

inline std::string canonical_tag(const std::string& tag) { return FeatureSpec::parse(tag).tag(); }

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("missing " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// Run manifest, read-modify-written by every command.
class Manifest {
 public:
  explicit Manifest(const RunConfig& c) : path_(c.out_dir / "manifest.json") {
    if (fs::exists(path_)) doc_ = read_json(path_);
    if (!doc_.is_object()) doc_ = nlohmann::json::object();
    doc_["config"] = to_json(c);
  }

  nlohmann::json* cache_entry(const std::string& key) {
    auto& caches = doc_["caches"];
    return caches.is_object() && caches.contains(key) ? &caches[key] : nullptr;
  }

  void set_cache_entry(const std::string& key, nlohmann::json entry) { doc_["caches"][key] = std::move(entry); }
  void note(const std::string& section, const std::string& key, nlohmann::json value) {
    doc_[section][key] = std::move(value);
  }

  void save() {
    doc_["updated_at"] = utc_now();
    write_text(path_, doc_.dump(2) + "\n");
  }

 private:
  fs::path path_;
  nlohmann::json doc_ = nlohmann::json::object();
};

// Hash of everything that determines a cache's contents besides the spec.
inline std::string input_fingerprint(std::string_view split, std::size_t limit, std::uint64_t seed,
                                     const std::vector<LabeledPath>& entries) {
  Sha256 h;
  h.update(split).update("\n" + std::to_string(limit) + "\n" + std::to_string(seed) + "\n");
  for (const auto& e : entries) {
    const auto size = fs::file_size(e.path);
    const auto mtime = fs::last_write_time(e.path).time_since_epoch().count();
    h.update(e.path.string() + "\t" + std::to_string(e.label) + "\t" + std::to_string(size) + "\t" +
             std::to_string(mtime) + "\n");
  }
  return h.hex();
}

struct ExtractSummary {
  std::vector<fs::path> written;
  std::vector<fs::path> skipped;
};

inline ExtractSummary cmd_extract(const RunConfig& config, std::ostream& log) {
  config.validate();
  Manifest manifest(config);
  ExtractSummary summary;
  for (auto split : kSplitDirs) {
    if (!fs::is_directory(config.data_root / split)) {
      if (split == "train") throw EmptyDatasetError((config.data_root / "train").string() + " not found");
      continue;
    }
    const std::size_t limit = split == "train" ? config.train_limit : config.test_limit;
    const auto entries = limit_entries(scan_dataset(config.data_root, split), limit, config.seed);
    const auto fingerprint = input_fingerprint(split, limit, config.seed, entries);
    std::vector<ImageRecord> images;
    for (const auto& requested : config.features) {
      const auto spec = FeatureSpec::parse(requested);
      const auto tag = spec.tag();
      const auto path = cache_path(config, split, tag);
      const std::string key = std::string(split) + "/" + tag;
      if (fs::exists(path)) {
        const auto header = read_cache_header(path);
        if (header.cols != spec.dimension())
          throw CacheConflictError(path.string() + ": has " + std::to_string(header.cols) +
                                   " columns, spec '" + tag + "' needs " + std::to_string(spec.dimension()));
        const auto* entry = manifest.cache_entry(key);
        if (entry && entry->value("inputs", "") == fingerprint &&
            entry->value("sha256", "") == sha256_file(path)) {
          log << "extract: " << key << " up to date\n";
          summary.skipped.push_back(path);
          continue;
        }
      }
      if (images.empty()) {
        log << "extract: decoding " << entries.size() << " " << split << " images\n";
        images = load_images(entries);
      }
      const auto features = extract_matrix<float>(images, spec);
      std::vector<Label> labels;
      labels.reserve(images.size());
      for (const auto& im : images) labels.push_back(im.label);
      write_cache(features, labels, tag, path);
      manifest.set_cache_entry(key, {{"path", fs::relative(path, config.out_dir).string()},
                                     {"sha256", sha256_file(path)},
                                     {"inputs", fingerprint},
                                     {"rows", features.rows()},
                                     {"cols", features.cols()},
                                     {"written_at", utc_now()}});
      log << "extract: wrote " << path.string() << " (" << features.rows() << " x " << features.cols() << ")\n";
      summary.written.push_back(path);
    }
  }
  manifest.save();
  return summary;
}

// Loads a cache after checking its bytes against the manifest checksum.
inline FeatureCache load_verified_cache(const RunConfig& config, Manifest& manifest,
                                        std::string_view split, const std::string& tag) {
  const auto path = cache_path(config, split, tag);
  const std::string key = std::string(split) + "/" + tag;
  const auto* entry = manifest.cache_entry(key);
  if (!entry || !fs::exists(path))
    throw MissingArtifactError("no " + key + " feature cache; run extract first");
  const auto bytes = read_bytes(path);
  const auto digest = sha256_hex({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
  if (digest != entry->value("sha256", ""))
    throw ChecksumError(path.string() + ": checksum does not match manifest");
  auto cache = decode_cache(bytes);
  if (cache.features.cols() != FeatureSpec::parse(tag).dimension())
    throw CacheConflictError(path.string() + ": column count does not match spec '" + tag + "'");
  return cache;
}

template <class T>
BaseModel fit_base_model(const std::string& name, const BasicMatrix<T>& x, std::span<const Label> y,
                         const RunConfig& config) {
  if (name == "logreg") {
    LogisticParams p;
    p.seed = config.seed;
    return logreg_fit(x, y, p);
  }
  if (name == "random_forest" || name == "extra_trees") {
    ForestParams p;
    p.mode = name == "random_forest" ? ForestMode::random_forest : ForestMode::extra_trees;
    p.n_trees = config.forest_trees;
    p.seed = config.seed;
    return forest_fit(x, y, p);
  }
  if (name == "gbdt_leafwise" || name == "gbdt_levelwise") {
    GbdtParams p = name == "gbdt_leafwise" ? GbdtParams::leaf_wise_defaults() : GbdtParams::level_wise_defaults();
    p.n_trees = config.gbdt_rounds;
    p.learning_rate = config.gbdt_learning_rate;
    return gbdt_fit(x, y, p);
  }
  throw ConfigError("unknown base model '" + name + "'");
}

inline AnyModel to_any(BaseModel m) {
  return std::visit([](auto&& v) -> AnyModel { return std::move(v); }, std::move(m));
}

struct TrainSummary {
  std::map<std::string, ThresholdResult> thresholds;  // "<spec>/<model>"
};

inline TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  Manifest manifest(config);
  TrainSummary summary;
  for (const auto& requested : config.features) {
    const auto tag = canonical_tag(requested);
    const auto cache = load_verified_cache(config, manifest, "train", tag);
    const auto split = stratified_split(cache.labels, config.val_fraction, config.seed);
    const auto x_train = cache.features.take_rows(split.train_idx);
    const auto x_val = cache.features.take_rows(split.val_idx);
    const auto y_train = take<Label>(cache.labels, split.train_idx);
    const auto y_val = take<Label>(cache.labels, split.val_idx);

    std::map<std::string, BaseModel> fitted;
    auto base = [&](const std::string& name) -> const BaseModel& {
      auto it = fitted.find(name);
      if (it == fitted.end()) {
        log << "train: " << tag << "/" << name << " on " << x_train.rows() << " rows\n";
        it = fitted.emplace(name, fit_base_model(name, x_train, y_train, config)).first;
      }
      return it->second;
    };

    for (const auto& name : config.models) {
      AnyModel model;
      if (name == "voting") {
        VotingModel v;
        for (const auto& m : config.voting_members) v.members.push_back({m, base(m)});
        model = std::move(v);
      } else {
        model = to_any(base(name));
      }
      const auto p_val = predict_proba(model, x_val);
      const auto threshold = tune_threshold(y_val, p_val);
      const auto dir = run_dir(config, tag, name);
      save_model(model, dir / "model.json");
      write_text(dir / "threshold.json", to_json(threshold).dump(2) + "\n");
      if (name == "voting")
        write_text(dir / "members.json", nlohmann::json{{"members", config.voting_members}}.dump(2) + "\n");
      manifest.note("runs", tag + "/" + name,
                    {{"trained_at", utc_now()},
                     {"train_rows", x_train.rows()},
                     {"val_rows", x_val.rows()},
                     {"tau_star", threshold.tau_star},
                     {"val_f1", threshold.val_f1}});
      log << "train: " << tag << "/" << name << " tau*=" << threshold.tau_star << " val_f1=" << threshold.val_f1
          << "\n";
      summary.thresholds[tag + "/" + name] = threshold;
    }
  }
  manifest.save();
  return summary;
}

inline std::vector<ResultRow> cmd_evaluate(const RunConfig& config, std::ostream& log) {
  config.validate();
  Manifest manifest(config);
  std::vector<ResultRow> rows;
  for (const auto& requested : config.features) {
    const auto tag = canonical_tag(requested);
    // Artifacts are checked before the test cache so a missing training run
    // is reported as such.
    for (const auto& name : config.models) {
      const auto dir = run_dir(config, tag, name);
      for (const char* f : {"model.json", "threshold.json"})
        if (!fs::exists(dir / f))
          throw MissingArtifactError((dir / f).string() + " not found; run train first");
    }
    const auto cache = load_verified_cache(config, manifest, "test", tag);
    for (const auto& name : config.models) {
      const auto dir = run_dir(config, tag, name);
      const auto model = load_model(dir / "model.json");
      const auto threshold = threshold_from_json(read_json(dir / "threshold.json"));
      const auto p = predict_proba(model, cache.features);
      const auto report = evaluate(cache.labels, p, threshold.tau_star);
      write_text(dir / "metrics.json", to_json(report).dump(2) + "\n");
      manifest.note("evaluations", tag + "/" + name, {{"evaluated_at", utc_now()}, {"test_rows", p.size()}});
      log << "evaluate: " << tag << "/" << name << " roc_auc=" << report.roc_auc
          << " bal_acc=" << report.balanced_accuracy << "\n";
      rows.push_back({name, tag, report});
    }
  }
  manifest.save();
  return rows;
}

// Collects every runs/<spec>/<model>/metrics.json under the output directory.
inline std::vector<ResultRow> collect_results(const RunConfig& config) {
  std::vector<ResultRow> rows;
  const auto runs = config.out_dir / "runs";
  if (fs::is_directory(runs))
    for (const auto& spec_dir : fs::directory_iterator(runs)) {
      if (!spec_dir.is_directory()) continue;
      for (const auto& model_dir : fs::directory_iterator(spec_dir.path())) {
        const auto f = model_dir.path() / "metrics.json";
        if (!fs::exists(f)) continue;
        rows.push_back({model_dir.path().filename().string(), spec_dir.path().filename().string(),
                        metrics_from_json(read_json(f))});
      }
    }
  sort_results(rows);
  return rows;
}

struct ReportSummary {
  std::vector<ResultRow> rows;
  std::vector<fs::path> files;
};

inline ReportSummary cmd_report(const RunConfig& config, std::ostream& log) {
  ReportSummary summary;
  summary.rows = collect_results(config);
  if (summary.rows.empty()) throw NoResultsError("no metrics.json under " + (config.out_dir / "runs").string());
  const auto dir = config.out_dir / "report";
  std::vector<std::string> specs;
  for (const auto& r : summary.rows)
    if (std::find(specs.begin(), specs.end(), r.spec) == specs.end()) specs.push_back(r.spec);
  for (const auto& spec : specs) {
    for (const auto& [ext, text] : {std::pair{".md", markdown_table(summary.rows, spec)},
                                    std::pair{".csv", csv_table(summary.rows, spec)}}) {
      const auto path = dir / ("table_" + spec + ext);
      write_text(path, text);
      summary.files.push_back(path);
    }
  }
  write_text(dir / "metrics_long.csv", long_csv(summary.rows));
  write_text(dir / "trend.csv", trend_csv(summary.rows));
  summary.files.push_back(dir / "metrics_long.csv");
  summary.files.push_back(dir / "trend.csv");
  for (const auto& spec : specs) log << markdown_table(summary.rows, spec) << "\n";
  return summary;
}

inline ReportSummary cmd_run_all(const RunConfig& config, std::ostream& log) {
  cmd_extract(config, log);
  cmd_train(config, log);
  cmd_evaluate(config, log);
  return cmd_report(config, log);
}

}  // namespace fakery
