#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fakery/features/gray.hpp"

namespace fakery {

inline constexpr std::size_t kDctBlock = 8;
inline constexpr std::size_t kDctDim = 3 * kDctBlock * kDctBlock;

// Orthonormal DCT-II basis: basis[k * N + n] = s_k cos(pi (2n + 1) k / 2N).
template <std::size_t N>
const SquareGrid<N>& dct_basis() {
  static const SquareGrid<N> basis = [] {
    SquareGrid<N> b{};
    for (std::size_t k = 0; k < N; ++k) {
      const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(N));
      for (std::size_t n = 0; n < N; ++n)
        b[k * N + n] = scale * std::cos(std::numbers::pi * static_cast<double>((2 * n + 1) * k) /
                                        static_cast<double>(2 * N));
    }
    return b;
  }();
  return basis;
}

// Separable orthonormal 2-D DCT-II: X = C x C^T, rows first then columns.
// X[u * N + v] holds vertical frequency u and horizontal frequency v.
template <std::size_t N>
SquareGrid<N> dct2(const SquareGrid<N>& x) {
  const auto& c = dct_basis<N>();
  SquareGrid<N> tmp{};
  // Along rows: tmp[r][v] = sum_n x[r][n] c[v][n]
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t v = 0; v < N; ++v) {
      double acc = 0.0;
      for (std::size_t n = 0; n < N; ++n) acc += x[r * N + n] * c[v * N + n];
      tmp[r * N + v] = acc;
    }
  SquareGrid<N> out{};
  // Along columns: out[u][v] = sum_r c[u][r] tmp[r][v]
  for (std::size_t u = 0; u < N; ++u)
    for (std::size_t v = 0; v < N; ++v) {
      double acc = 0.0;
      for (std::size_t r = 0; r < N; ++r) acc += c[u * N + r] * tmp[r * N + v];
      out[u * N + v] = acc;
    }
  return out;
}

// Top-left 8x8 block of each channel's DCT (channel scaled to [0, 1]),
// row-major within a block, channels in R, G, B order.
inline std::vector<double> extract_dct(const ImageRecord& image) {
  std::vector<double> out;
  out.reserve(kDctDim);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    GrayImage channel{};
    for (std::size_t i = 0; i < kImagePixels; ++i) channel[i] = image.pixels[3 * i + ch] / 255.0;
    const auto coeffs = dct2<kImageSide>(channel);
    for (std::size_t u = 0; u < kDctBlock; ++u)
      for (std::size_t v = 0; v < kDctBlock; ++v) out.push_back(coeffs[u * kImageSide + v]);
  }
  return out;
}

}  // namespace fakery
