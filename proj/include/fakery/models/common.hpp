#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "fakery/error.hpp"
#include "fakery/image.hpp"

namespace fakery {

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
inline double softplus_neg(double margin) noexcept {
  return std::log1p(std::exp(-std::abs(margin))) + std::max(-margin, 0.0);
}

inline void require_both_classes(std::span<const Label> y, const char* who) {
  bool seen[2] = {false, false};
  for (auto l : y) seen[l != 0] = true;
  if (!seen[0] || !seen[1]) throw SingleClassError(std::string(who) + ": both classes required");
}

inline void require_dimension(std::size_t got, std::size_t want, const char* who) {
  if (got != want)
    throw DimensionError(std::string(who) + ": expected " + std::to_string(want) +
                         " features, got " + std::to_string(got));
}

// Mean binary log-loss of probabilities against labels.
inline double log_loss(std::span<const Label> y, std::span<const double> p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double q = std::clamp(p[i], 1e-15, 1.0 - 1e-15);
    acc -= y[i] ? std::log(q) : std::log1p(-q);
  }
  return acc / static_cast<double>(y.size());
}

}  // namespace fakery
