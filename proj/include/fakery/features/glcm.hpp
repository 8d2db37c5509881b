#pragma once

// Gray-level co-occurrence statistics: 32 levels, distance 1, four angles.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fakery/features/gray.hpp"

namespace fakery {

inline constexpr std::size_t kGlcmLevels = 32;
inline constexpr std::size_t kGlcmDim = 16;

// (row, col) offsets for 0, 45, 90 and 135 degrees.
inline constexpr std::array<std::array<int, 2>, 4> kGlcmOffsets{{{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

using Glcm = std::array<double, kGlcmLevels * kGlcmLevels>;

inline std::array<std::uint8_t, kImagePixels> glcm_quantize(const GrayImage& gray) {
  std::array<std::uint8_t, kImagePixels> q{};
  for (std::size_t i = 0; i < kImagePixels; ++i)
    q[i] = static_cast<std::uint8_t>(std::min<double>(kGlcmLevels - 1, std::floor(gray[i] / 8.0)));
  return q;
}

// Symmetric co-occurrence matrix for one offset, normalized to sum 1.
inline Glcm glcm_matrix(const std::array<std::uint8_t, kImagePixels>& q, int dr, int dc) {
  constexpr int n = static_cast<int>(kImageSide);
  std::array<std::size_t, kGlcmLevels * kGlcmLevels> counts{};
  std::size_t total = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int r2 = r + dr, c2 = c + dc;
      if (r2 < 0 || r2 >= n || c2 < 0 || c2 >= n) continue;
      const std::size_t i = q[static_cast<std::size_t>(r * n + c)];
      const std::size_t j = q[static_cast<std::size_t>(r2 * n + c2)];
      ++counts[i * kGlcmLevels + j];
      ++counts[j * kGlcmLevels + i];
      total += 2;
    }
  Glcm p{};
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  return p;
}

struct GlcmStats {
  double contrast = 0.0;
  double homogeneity = 0.0;
  double energy = 0.0;
  double correlation = 0.0;
};

inline GlcmStats glcm_stats(const Glcm& p) {
  GlcmStats s;
  double mu_i = 0.0, mu_j = 0.0, asm_sum = 0.0;
  for (std::size_t i = 0; i < kGlcmLevels; ++i)
    for (std::size_t j = 0; j < kGlcmLevels; ++j) {
      const double pij = p[i * kGlcmLevels + j];
      const double d = static_cast<double>(i) - static_cast<double>(j);
      s.contrast += d * d * pij;
      s.homogeneity += pij / (1.0 + d * d);
      asm_sum += pij * pij;
      mu_i += static_cast<double>(i) * pij;
      mu_j += static_cast<double>(j) * pij;
    }
  s.energy = std::sqrt(asm_sum);
  double var_i = 0.0, var_j = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < kGlcmLevels; ++i)
    for (std::size_t j = 0; j < kGlcmLevels; ++j) {
      const double pij = p[i * kGlcmLevels + j];
      const double di = static_cast<double>(i) - mu_i;
      const double dj = static_cast<double>(j) - mu_j;
      var_i += di * di * pij;
      var_j += dj * dj * pij;
      cov += di * dj * pij;
    }
  const double denom = std::sqrt(var_i) * std::sqrt(var_j);
  s.correlation = denom == 0.0 ? 1.0 : std::clamp(cov / denom, -1.0, 1.0);
  return s;
}

// Per angle: contrast, homogeneity, energy, correlation.
inline std::vector<double> extract_glcm(const GrayImage& gray) {
  const auto q = glcm_quantize(gray);
  std::vector<double> out;
  out.reserve(kGlcmDim);
  for (const auto& [dr, dc] : kGlcmOffsets) {
    const auto s = glcm_stats(glcm_matrix(q, dr, dc));
    out.insert(out.end(), {s.contrast, s.homogeneity, s.energy, s.correlation});
  }
  return out;
}

}  // namespace fakery
