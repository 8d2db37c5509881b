#pragma once

// Histogram of oriented gradients on a 32x32 grayscale image.
//
// Cells are 8x8 pixels (4x4 grid), blocks are 2x2 cells stepped one cell at
// a time (3x3 grid), 9 unsigned orientation bins centred at 10, 30, ..., 170
// degrees. Each block is L2-Hys normalized.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fakery/features/gray.hpp"

namespace fakery {

struct HogParams {
  static constexpr std::size_t cell = 8;
  static constexpr std::size_t cells_per_side = kImageSide / cell;  // 4
  static constexpr std::size_t block = 2;                           // cells
  static constexpr std::size_t blocks_per_side = cells_per_side - block + 1;  // 3
  static constexpr std::size_t bins = 9;
  static constexpr double bin_width = 180.0 / bins;
  static constexpr double clip = 0.2;
  static constexpr double eps = 1e-12;
};

inline constexpr std::size_t kHogBlockDim =
    HogParams::block * HogParams::block * HogParams::bins;  // 36
inline constexpr std::size_t kHogDim =
    HogParams::blocks_per_side * HogParams::blocks_per_side * kHogBlockDim;  // 324

// Unsigned orientation in degrees, [0, 180). A purely horizontal gradient
// (a vertical edge) maps to 90 degrees, a purely vertical one to 0.
inline double hog_orientation(double gx, double gy) {
  double theta = std::atan2(gx, gy) * (180.0 / std::numbers::pi);
  if (theta < 0.0) theta += 180.0;
  if (theta >= 180.0) theta -= 180.0;
  return theta;
}

// Per-cell orientation histograms, cells row-major, bins ascending.
inline std::vector<double> hog_cell_histograms(const GrayImage& gray) {
  constexpr std::size_t n = kImageSide;
  constexpr auto B = HogParams::bins;
  std::vector<double> cells(HogParams::cells_per_side * HogParams::cells_per_side * B, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t up = r == 0 ? 0 : r - 1;
    const std::size_t down = r + 1 == n ? n - 1 : r + 1;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t left = c == 0 ? 0 : c - 1;
      const std::size_t right = c + 1 == n ? n - 1 : c + 1;
      const double gx = gray[r * n + right] - gray[r * n + left];
      const double gy = gray[down * n + c] - gray[up * n + c];
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      // Linear vote between the two nearest bin centres, wrapping at 180.
      const double pos = hog_orientation(gx, gy) / HogParams::bin_width - 0.5;
      const double lo_f = std::floor(pos);
      const double frac = pos - lo_f;
      const auto lo = static_cast<std::size_t>((static_cast<long>(lo_f) + B) % B);
      const std::size_t hi = (lo + 1) % B;
      const std::size_t cell =
          (r / HogParams::cell) * HogParams::cells_per_side + c / HogParams::cell;
      cells[cell * B + lo] += (1.0 - frac) * mag;
      cells[cell * B + hi] += frac * mag;
    }
  }
  return cells;
}

// L2-Hys on one block, in place.
inline void l2_hys(std::span<double> block) {
  auto normalize = [&] {
    double ss = 0.0;
    for (double v : block) ss += v * v;
    const double norm = std::sqrt(ss + HogParams::eps);
    for (double& v : block) v /= norm;
  };
  normalize();
  for (double& v : block) v = std::min(v, HogParams::clip);
  normalize();
}

inline std::vector<double> extract_hog(const GrayImage& gray) {
  constexpr auto B = HogParams::bins;
  constexpr auto cps = HogParams::cells_per_side;
  const auto cells = hog_cell_histograms(gray);
  std::vector<double> out;
  out.reserve(kHogDim);
  for (std::size_t br = 0; br < HogParams::blocks_per_side; ++br)
    for (std::size_t bc = 0; bc < HogParams::blocks_per_side; ++bc) {
      const std::size_t start = out.size();
      for (std::size_t cr = 0; cr < HogParams::block; ++cr)
        for (std::size_t cc = 0; cc < HogParams::block; ++cc) {
          const std::size_t cell = (br + cr) * cps + (bc + cc);
          out.insert(out.end(), cells.begin() + static_cast<std::ptrdiff_t>(cell * B),
                     cells.begin() + static_cast<std::ptrdiff_t>((cell + 1) * B));
        }
      l2_hys(std::span<double>(out).subspan(start, kHogBlockDim));
    }
  return out;
}

}  // namespace fakery
