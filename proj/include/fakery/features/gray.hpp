#pragma once

#include <array>

#include "fakery/image.hpp"

namespace fakery {

// Square grid of doubles, row-major.
template <std::size_t N>
using SquareGrid = std::array<double, N * N>;

// 32x32 luma in [0, 255].
using GrayImage = SquareGrid<kImageSide>;

// BT.601 luma, unrounded.
inline GrayImage to_grayscale(const ImageRecord& image) {
  GrayImage gray{};
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    const double r = image.pixels[3 * i];
    const double g = image.pixels[3 * i + 1];
    const double b = image.pixels[3 * i + 2];
    gray[i] = 0.299 * r + 0.587 * g + 0.114 * b;
  }
  return gray;
}

}  // namespace fakery
