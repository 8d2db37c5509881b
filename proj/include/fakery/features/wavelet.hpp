#pragma once

// Single-level periodized 2-D discrete wavelet transform with the 4-tap
// Daubechies (db2) filter pair.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fakery/features/gray.hpp"

namespace fakery {

inline constexpr std::size_t kWaveletDim = 5;

struct WaveletFilters {
  std::array<double, 4> low{};
  std::array<double, 4> high{};
};

// high[k] = (-1)^k low[3 - k]
inline WaveletFilters db2_filters() {
  const double s3 = std::numbers::sqrt3;
  const double denom = 4.0 * std::numbers::sqrt2;
  WaveletFilters f;
  f.low = {(1.0 + s3) / denom, (3.0 + s3) / denom, (3.0 - s3) / denom, (1.0 - s3) / denom};
  for (std::size_t k = 0; k < 4; ++k) f.high[k] = (k % 2 == 0 ? 1.0 : -1.0) * f.low[3 - k];
  return f;
}

template <std::size_t N>
struct Subbands {
  static constexpr std::size_t half = N / 2;
  SquareGrid<half> a{};   // low along rows, low along columns
  SquareGrid<half> lh{};  // low along rows, high along columns
  SquareGrid<half> hl{};  // high along rows, low along columns
  SquareGrid<half> hh{};
};

namespace detail {

// y[n] = sum_k f[k] x[(2n - k) mod len] over `len` samples spaced `stride`
// apart, writing len / 2 outputs spaced `out_stride` apart.
inline void analyze_periodic(const double* x, std::size_t len, std::size_t stride,
                             const std::array<double, 4>& f, double* y, std::size_t out_stride) {
  for (std::size_t n = 0; n < len / 2; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const std::size_t idx = (2 * n + len * f.size() - k) % len;
      acc += f[k] * x[idx * stride];
    }
    y[n * out_stride] = acc;
  }
}

}  // namespace detail

// "Rows" means filtering along each row (the horizontal direction); the
// column stage then filters vertically.
template <std::size_t N>
Subbands<N> dwt2(const SquareGrid<N>& x, const WaveletFilters& f) {
  static_assert(N % 2 == 0 && N >= 4);
  constexpr std::size_t H = N / 2;
  // Row stage: N rows -> low half and high half, each N x H.
  std::array<double, N * H> row_low{}, row_high{};
  for (std::size_t r = 0; r < N; ++r) {
    detail::analyze_periodic(&x[r * N], N, 1, f.low, &row_low[r * H], 1);
    detail::analyze_periodic(&x[r * N], N, 1, f.high, &row_high[r * H], 1);
  }
  Subbands<N> out;
  for (std::size_t c = 0; c < H; ++c) {
    detail::analyze_periodic(&row_low[c], N, H, f.low, &out.a[c], H);
    detail::analyze_periodic(&row_low[c], N, H, f.high, &out.lh[c], H);
    detail::analyze_periodic(&row_high[c], N, H, f.low, &out.hl[c], H);
    detail::analyze_periodic(&row_high[c], N, H, f.high, &out.hh[c], H);
  }
  return out;
}

template <class Grid>
double subband_energy(const Grid& band) {
  double acc = 0.0;
  for (double v : band) acc += v * v;
  return acc / static_cast<double>(band.size());
}

// [E(LH), E(HL), E(HH), mean(A), population std(A)]
inline std::vector<double> extract_wavelet(const GrayImage& gray) {
  const auto bands = dwt2<kImageSide>(gray, db2_filters());
  const double count = static_cast<double>(bands.a.size());
  double mean = 0.0;
  for (double v : bands.a) mean += v;
  mean /= count;
  double var = 0.0;
  for (double v : bands.a) var += (v - mean) * (v - mean);
  var /= count;
  return {subband_energy(bands.lh), subband_energy(bands.hl), subband_energy(bands.hh), mean,
          std::sqrt(var)};
}

}  // namespace fakery
