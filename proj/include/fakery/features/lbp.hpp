#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include "fakery/features/gray.hpp"

namespace fakery {

inline constexpr std::size_t kLbpSide = kImageSide - 2;  // interior only
inline constexpr std::size_t kLbpBins = 16;
inline constexpr std::size_t kLbpDim = kLbpBins;
inline constexpr std::uint8_t kLbpNonUniform = 9;

// Neighbour p = 0..7 as (row, col) offsets, counter-clockwise from east.
inline constexpr std::array<std::array<int, 2>, 8> kLbpOffsets{{
    {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}}};

using LbpCodes = std::array<std::uint8_t, kLbpSide * kLbpSide>;

// Raw P=8, R=1 codes for rows/cols 1..30, row-major.
inline LbpCodes lbp_codes(const GrayImage& gray) {
  constexpr int n = static_cast<int>(kImageSide);
  LbpCodes codes{};
  for (int r = 1; r < n - 1; ++r)
    for (int c = 1; c < n - 1; ++c) {
      const double center = gray[static_cast<std::size_t>(r * n + c)];
      unsigned code = 0;
      for (std::size_t p = 0; p < kLbpOffsets.size(); ++p) {
        const int rr = r + kLbpOffsets[p][0];
        const int cc = c + kLbpOffsets[p][1];
        if (gray[static_cast<std::size_t>(rr * n + cc)] - center >= 0.0) code |= 1u << p;
      }
      codes[static_cast<std::size_t>((r - 1) * (n - 2) + (c - 1))] = static_cast<std::uint8_t>(code);
    }
  return codes;
}

// Rotation-invariant uniform mapping: popcount for patterns with at most two
// circular 0/1 transitions, 9 otherwise.
constexpr std::uint8_t uniform_lbp(std::uint8_t code) noexcept {
  const auto rotated = static_cast<std::uint8_t>((code >> 1) | (code << 7));
  const int transitions = std::popcount(static_cast<unsigned>(code ^ rotated));
  return transitions <= 2 ? static_cast<std::uint8_t>(std::popcount(static_cast<unsigned>(code)))
                          : kLbpNonUniform;
}

// Uniform codes (0..9) in 16 unit bins over [0, 16), normalized to unit mass.
// Bins 10..15 cannot be reached with 8 neighbours and are always zero; they
// are kept so the descriptor has its documented width.
inline std::vector<double> extract_lbp(const GrayImage& gray) {
  const auto codes = lbp_codes(gray);
  std::array<std::size_t, kLbpBins> counts{};
  for (auto code : codes) ++counts[uniform_lbp(code)];
  std::vector<double> out(kLbpDim);
  for (std::size_t b = 0; b < kLbpBins; ++b)
    out[b] = static_cast<double>(counts[b]) / static_cast<double>(codes.size());
  return out;
}

}  // namespace fakery
