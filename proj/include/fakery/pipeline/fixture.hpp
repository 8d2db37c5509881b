#pragma once

// Synthetic dataset trees for running the pipeline without the real data.
// REAL images are uniform RGB noise; FAKE images are the same kind of noise
// passed twice through a 3x3 box blur and re-quantized, which removes high
// frequencies. With null_signal both classes are plain noise.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>

#include "fakery/dataset.hpp"
#include "fakery/image.hpp"
#include "fakery/random.hpp"

namespace fakery {

struct FixtureOptions {
  std::size_t n_per_class = 50;
  std::uint64_t seed = 42;
  bool null_signal = false;
};

inline ImageRecord noise_image(SplitMix64& rng) {
  ImageRecord img;
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

// One 3x3 box-blur pass per channel with replicated borders.
inline std::array<double, kImageBytes> box_blur(const std::array<double, kImageBytes>& in) {
  constexpr int n = static_cast<int>(kImageSide);
  std::array<double, kImageBytes> out{};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = std::clamp(r + dr, 0, n - 1), cc = std::clamp(c + dc, 0, n - 1);
            acc += in[static_cast<std::size_t>((rr * n + cc) * 3 + ch)];
          }
        out[static_cast<std::size_t>((r * n + c) * 3 + ch)] = acc / 9.0;
      }
  return out;
}

inline ImageRecord blurred_noise_image(SplitMix64& rng) {
  const ImageRecord noise = noise_image(rng);
  std::array<double, kImageBytes> buf{};
  for (std::size_t i = 0; i < kImageBytes; ++i) buf[i] = noise.pixels[i];
  buf = box_blur(box_blur(buf));
  ImageRecord img;
  for (std::size_t i = 0; i < kImageBytes; ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(buf[i]), 0L, 255L));
  return img;
}

// Writes n_per_class images per class per split:
// out/{train,test}/{REAL,FAKE}/NNNNN.png
inline void make_fixture(const std::filesystem::path& out, const FixtureOptions& opt) {
  if (opt.n_per_class < 2) throw ConfigError("make_fixture: n_per_class must be at least 2");
  for (std::size_t s = 0; s < kSplitDirs.size(); ++s)
    for (std::size_t label = 0; label < kClassDirs.size(); ++label) {
      const auto dir = out / kSplitDirs[s] / kClassDirs[label];
      std::filesystem::create_directories(dir);
      for (std::size_t i = 0; i < opt.n_per_class; ++i) {
        SplitMix64 rng(derive_seed(opt.seed, (s * 2 + label) * 1'000'000'007ULL + i));
        ImageRecord img = (label == 1 && !opt.null_signal) ? blurred_noise_image(rng) : noise_image(rng);
        img.label = static_cast<Label>(label);
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.png", i);
        write_png(img, dir / name);
      }
    }
}

}  // namespace fakery
