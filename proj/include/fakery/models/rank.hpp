#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

namespace fakery {

// 1-based ranks, tied values sharing the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

// Maps arbitrary decision scores into (0, 1) by (average rank - 0.5) / n.
inline std::vector<double> rank_to_unit(std::span<const double> scores) {
  auto ranks = average_ranks(scores);
  const double n = static_cast<double>(scores.size());
  for (auto& r : ranks) r = (r - 0.5) / n;
  return ranks;
}

}  // namespace fakery
