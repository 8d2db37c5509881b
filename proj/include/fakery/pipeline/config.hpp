#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakery/error.hpp"
#include "fakery/features/spec.hpp"

namespace fakery {

inline const std::vector<std::string> kModelNames{
    "logreg", "random_forest", "extra_trees", "gbdt_leafwise", "gbdt_levelwise", "voting"};

inline const std::vector<std::string> kDefaultVotingMembers{"logreg", "random_forest",
                                                            "extra_trees", "gbdt_leafwise"};

struct RunConfig {
  std::filesystem::path data_root = "data";
  std::vector<std::string> features{"baseline", "advanced", "mixed"};
  std::vector<std::string> models = kModelNames;
  std::uint64_t seed = 42;
  double val_fraction = 0.10;
  std::size_t train_limit = 0;  // 0 = no cap
  std::size_t test_limit = 0;
  std::filesystem::path out_dir = "runs";
  std::size_t gbdt_rounds = 500;
  double gbdt_learning_rate = 0.05;
  std::size_t forest_trees = 500;
  std::vector<std::string> voting_members = kDefaultVotingMembers;

  void validate() const {
    for (const auto& f : features) FeatureSpec::parse(f);
    auto check_models = [](const std::vector<std::string>& names, bool allow_voting) {
      for (const auto& m : names)
        if (std::find(kModelNames.begin(), kModelNames.end(), m) == kModelNames.end() ||
            (!allow_voting && m == "voting"))
          throw ConfigError("unknown model '" + m + "'");
    };
    check_models(models, true);
    check_models(voting_members, false);
    if (features.empty()) throw ConfigError("no feature specs configured");
    if (models.empty()) throw ConfigError("no models configured");
    if (voting_members.empty()) throw ConfigError("voting needs at least one member");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must be in (0, 1)");
    if (gbdt_rounds == 0 || forest_trees == 0) throw ConfigError("ensemble sizes must be positive");
  }
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"data_root", c.data_root.string()},
          {"features", c.features},
          {"models", c.models},
          {"seed", c.seed},
          {"val_fraction", c.val_fraction},
          {"train_limit", c.train_limit},
          {"test_limit", c.test_limit},
          {"out_dir", c.out_dir.string()},
          {"gbdt_rounds", c.gbdt_rounds},
          {"gbdt_learning_rate", c.gbdt_learning_rate},
          {"forest_trees", c.forest_trees},
          {"voting_members", c.voting_members}};
}

// Sets one key from its string form, as given on the command line or in an
// environment variable. List values are comma-separated.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "data_root") c.data_root = value;
    else if (key == "features") c.features = split_list(value);
    else if (key == "models") c.models = split_list(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "val_fraction") c.val_fraction = std::stod(value);
    else if (key == "train_limit") c.train_limit = std::stoull(value);
    else if (key == "test_limit") c.test_limit = std::stoull(value);
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "gbdt_rounds") c.gbdt_rounds = std::stoull(value);
    else if (key == "gbdt_learning_rate") c.gbdt_learning_rate = std::stod(value);
    else if (key == "forest_trees") c.forest_trees = std::stoull(value);
    else if (key == "voting_members") c.voting_members = split_list(value);
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("value out of range for " + key + ": '" + value + "'");
  }
}

inline void merge_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.get<std::string>();
      }
      set_config_value(c, key, joined);
    } else if (value.is_string()) {
      set_config_value(c, key, value.get<std::string>());
    } else {
      set_config_value(c, key, value.dump());
    }
  }
}

inline void merge_file(RunConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    merge_json(c, nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// FAKERY_<KEY> for every config key, e.g. FAKERY_TRAIN_LIMIT.
inline void merge_env(RunConfig& c,
                      const std::function<const char*(const char*)>& getenv = [](const char* k) {
                        return std::getenv(k);
                      }) {
  const auto keys = to_json(RunConfig{});
  for (const auto& [key, _] : keys.items()) {
    std::string var = "FAKERY_";
    for (char ch : key) var.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (const char* v = getenv(var.c_str())) set_config_value(c, key, v);
  }
}

}  // namespace fakery
