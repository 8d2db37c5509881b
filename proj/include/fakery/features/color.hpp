#pragma once

#include <vector>

#include "fakery/image.hpp"

namespace fakery {

inline constexpr std::size_t kRawDim = kImageBytes;
inline constexpr std::size_t kHistBins = 16;
inline constexpr std::size_t kHistDim = 3 * kHistBins;

// Pixels scaled to [0, 1], in storage order.
inline std::vector<double> extract_raw(const ImageRecord& image) {
  std::vector<double> out(kRawDim);
  for (std::size_t i = 0; i < kRawDim; ++i) out[i] = image.pixels[i] / 255.0;
  return out;
}

// 16 bins per channel of width 16, each channel normalized to unit mass.
// Layout: R bins, G bins, B bins.
inline std::vector<double> extract_hist(const ImageRecord& image) {
  std::array<std::size_t, kHistDim> counts{};
  for (std::size_t i = 0; i < kImagePixels; ++i)
    for (std::size_t c = 0; c < 3; ++c) ++counts[c * kHistBins + image.pixels[3 * i + c] / 16];
  std::vector<double> out(kHistDim);
  for (std::size_t k = 0; k < kHistDim; ++k)
    out[k] = static_cast<double>(counts[k]) / static_cast<double>(kImagePixels);
  return out;
}

}  // namespace fakery
