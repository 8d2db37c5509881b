#pragma once

// JSON model artifacts. Trees are written in preorder as parallel arrays;
// a feature of -1 marks a leaf, and child links are implied by the order.

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fakery/error.hpp"
#include "fakery/models/voting.hpp"

namespace fakery {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline json tree_to_json(const Tree& tree) {
  json features = json::array(), thresholds = json::array(), values = json::array();
  for (const auto& n : tree.nodes) {
    features.push_back(n.feature);
    thresholds.push_back(n.is_leaf() ? 0.0 : n.threshold);
    values.push_back(n.is_leaf() ? n.value : 0.0);
  }
  return {{"feature", features}, {"threshold", thresholds}, {"value", values}};
}

inline Tree tree_from_json(const json& j) {
  const auto features = j.at("feature").get<std::vector<std::int32_t>>();
  const auto thresholds = j.at("threshold").get<std::vector<double>>();
  const auto values = j.at("value").get<std::vector<double>>();
  if (features.empty() || thresholds.size() != features.size() || values.size() != features.size())
    throw FormatError("model: malformed tree");
  Tree tree;
  tree.nodes.resize(features.size());
  std::size_t next = 0;
  auto read = [&](auto&& self) -> std::uint32_t {
    if (next >= features.size()) throw FormatError("model: truncated tree");
    const auto id = static_cast<std::uint32_t>(next++);
    auto& node = tree.nodes[id];
    node.feature = features[id];
    if (node.is_leaf()) {
      node.value = values[id];
    } else {
      node.threshold = thresholds[id];
      node.left = self(self);
      tree.nodes[id].right = self(self);
    }
    return id;
  };
  read(read);
  if (next != features.size()) throw FormatError("model: trailing tree nodes");
  return tree;
}

inline json trees_to_json(const std::vector<Tree>& trees) {
  json out = json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

inline std::vector<Tree> trees_from_json(const json& j) {
  std::vector<Tree> out;
  for (const auto& t : j) out.push_back(tree_from_json(t));
  return out;
}

inline json base_to_json(const LinearModel& m) {
  return {{"kind", "logreg"},
          {"params",
           {{"l2", m.params.l2}, {"max_iter", m.params.max_iter}, {"tol", m.params.tol},
            {"seed", m.params.seed}, {"history", m.params.history}}},
          {"standardizer", {{"mu", m.standardizer.mu}, {"sigma", m.standardizer.sigma}}},
          {"weights", m.weights},
          {"bias", m.bias},
          {"iterations", m.iterations}};
}

inline json base_to_json(const ForestModel& m) {
  return {{"kind", "forest"},
          {"params",
           {{"mode", m.params.mode == ForestMode::random_forest ? "random_forest" : "extra_trees"},
            {"n_trees", m.params.n_trees},
            {"seed", m.params.seed},
            {"max_features", m.params.max_features}}},
          {"n_features", m.n_features},
          {"trees", trees_to_json(m.trees)}};
}

inline json base_to_json(const GbdtModel& m) {
  return {{"kind", "gbdt"},
          {"params",
           {{"n_trees", m.params.n_trees},
            {"learning_rate", m.params.learning_rate},
            {"growth", m.params.growth == Growth::leaf_wise ? "leaf_wise" : "level_wise"},
            {"max_leaves", m.params.max_leaves},
            {"max_depth", m.params.max_depth},
            {"l2_lambda", m.params.l2_lambda},
            {"min_child_weight", m.params.min_child_weight},
            {"n_bins", m.params.n_bins}}},
          {"n_features", m.n_features},
          {"base_score", m.base_score},
          {"bin_edges", m.bin_edges},
          {"trees", trees_to_json(m.trees)}};
}

inline BaseModel base_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto& p = j.at("params");
  if (kind == "logreg") {
    LinearModel m;
    m.params.l2 = p.at("l2").get<double>();
    m.params.max_iter = p.at("max_iter").get<int>();
    m.params.tol = p.at("tol").get<double>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.history = p.at("history").get<int>();
    m.standardizer.mu = j.at("standardizer").at("mu").get<std::vector<double>>();
    m.standardizer.sigma = j.at("standardizer").at("sigma").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.iterations = j.at("iterations").get<int>();
    if (m.standardizer.mu.size() != m.weights.size() || m.standardizer.sigma.size() != m.weights.size())
      throw FormatError("model: standardizer size mismatch");
    return m;
  }
  if (kind == "forest") {
    ForestModel m;
    const auto mode = p.at("mode").get<std::string>();
    if (mode != "random_forest" && mode != "extra_trees") throw FormatError("model: bad forest mode");
    m.params.mode = mode == "random_forest" ? ForestMode::random_forest : ForestMode::extra_trees;
    m.params.n_trees = p.at("n_trees").get<std::size_t>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.max_features = p.at("max_features").get<std::size_t>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.trees = trees_from_json(j.at("trees"));
    return m;
  }
  if (kind == "gbdt") {
    GbdtModel m;
    m.params.n_trees = p.at("n_trees").get<std::size_t>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    const auto growth = p.at("growth").get<std::string>();
    if (growth != "leaf_wise" && growth != "level_wise") throw FormatError("model: bad growth");
    m.params.growth = growth == "leaf_wise" ? Growth::leaf_wise : Growth::level_wise;
    m.params.max_leaves = p.at("max_leaves").get<std::size_t>();
    m.params.max_depth = p.at("max_depth").get<std::size_t>();
    m.params.l2_lambda = p.at("l2_lambda").get<double>();
    m.params.min_child_weight = p.at("min_child_weight").get<double>();
    m.params.n_bins = p.at("n_bins").get<std::size_t>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.base_score = j.at("base_score").get<double>();
    m.bin_edges = j.at("bin_edges").get<std::vector<std::vector<double>>>();
    m.trees = trees_from_json(j.at("trees"));
    return m;
  }
  throw FormatError("model: unknown kind '" + kind + "'");
}

}  // namespace detail

inline json model_to_json(const AnyModel& model) {
  json body = std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, VotingModel>) {
          json members = json::array();
          for (const auto& mem : m.members) {
            json e = std::visit([](const auto& b) { return detail::base_to_json(b); }, mem.model);
            members.push_back({{"name", mem.name}, {"model", e}});
          }
          return {{"kind", "voting"}, {"members", members}};
        } else {
          return detail::base_to_json(m);
        }
      },
      model);
  body["format"] = "fakery-model";
  body["version"] = kModelFormatVersion;
  return body;
}

inline AnyModel model_from_json(const json& j) {
  try {
    if (j.value("format", "") != "fakery-model" || j.value("version", 0) != kModelFormatVersion)
      throw FormatError("model: unrecognized artifact format");
    if (j.at("kind").get<std::string>() == "voting") {
      VotingModel v;
      for (const auto& e : j.at("members"))
        v.members.push_back({e.at("name").get<std::string>(), detail::base_from_json(e.at("model"))});
      return v;
    }
    return std::visit([](auto&& m) -> AnyModel { return std::move(m); }, detail::base_from_json(j));
  } catch (const json::exception& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

inline void save_model(const AnyModel& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(model).dump() << '\n';
}

inline AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("no model at " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace fakery
