#pragma once

#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "fakery/models/forest.hpp"
#include "fakery/models/gbdt.hpp"
#include "fakery/models/logistic.hpp"

namespace fakery {

using BaseModel = std::variant<LinearModel, ForestModel, GbdtModel>;

struct VotingMember {
  std::string name;
  BaseModel model;
};

// Soft voting: arithmetic mean of member probabilities.
struct VotingModel {
  std::vector<VotingMember> members;

  std::size_t dimension() const {
    return members.empty() ? 0 : std::visit([](const auto& m) { return m.dimension(); }, members.front().model);
  }

  template <class T>
  std::vector<double> predict_proba(const BasicMatrix<T>& x) const {
    if (members.empty()) throw ConfigError("voting: no members");
    std::vector<double> acc(x.rows(), 0.0);
    for (const auto& m : members) {
      const auto p = std::visit([&](const auto& model) { return model.predict_proba(x); }, m.model);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    }
    for (auto& v : acc) v /= static_cast<double>(members.size());
    return acc;
  }
};

using AnyModel = std::variant<LinearModel, ForestModel, GbdtModel, VotingModel>;

template <class T>
std::vector<double> predict_proba(const AnyModel& model, const BasicMatrix<T>& x) {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model);
}

}  // namespace fakery
