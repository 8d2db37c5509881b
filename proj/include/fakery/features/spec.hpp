#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fakery/error.hpp"
#include "fakery/features/color.hpp"
#include "fakery/features/dct.hpp"
#include "fakery/features/glcm.hpp"
#include "fakery/features/gray.hpp"
#include "fakery/features/hog.hpp"
#include "fakery/features/lbp.hpp"
#include "fakery/features/wavelet.hpp"
#include "fakery/matrix.hpp"

namespace fakery {

// Canonical concatenation order.
enum class Family : std::uint8_t { raw, hist, dct, hog, lbp, glcm, wavelet };

inline constexpr std::size_t kFamilyCount = 7;
inline constexpr std::array<std::string_view, kFamilyCount> kFamilyNames{
    "raw", "hist", "dct", "hog", "lbp", "glcm", "wavelet"};
inline constexpr std::array<std::size_t, kFamilyCount> kFamilyDims{
    kRawDim, kHistDim, kDctDim, kHogDim, kLbpDim, kGlcmDim, kWaveletDim};

class FeatureSpec {
 public:
  FeatureSpec() = default;

  static FeatureSpec of(std::initializer_list<Family> families) {
    FeatureSpec s;
    for (auto f : families) s.active_.set(static_cast<std::size_t>(f));
    return s;
  }
  static FeatureSpec baseline() { return of({Family::raw, Family::hist, Family::dct}); }
  static FeatureSpec advanced() {
    return of({Family::hog, Family::lbp, Family::glcm, Family::wavelet});
  }
  static FeatureSpec mixed() {
    return of({Family::raw, Family::hist, Family::dct, Family::hog, Family::lbp, Family::glcm,
               Family::wavelet});
  }

  // Accepts "baseline", "advanced", "mixed" or a '+'-joined family list in
  // any order.
  static FeatureSpec parse(std::string_view tag) {
    if (tag == "baseline") return baseline();
    if (tag == "advanced") return advanced();
    if (tag == "mixed") return mixed();
    FeatureSpec s;
    while (!tag.empty()) {
      const auto plus = tag.find('+');
      const auto name = tag.substr(0, plus);
      const auto it = std::find(kFamilyNames.begin(), kFamilyNames.end(), name);
      if (it == kFamilyNames.end())
        throw ConfigError("unknown feature family '" + std::string(name) + "'");
      s.active_.set(static_cast<std::size_t>(it - kFamilyNames.begin()));
      tag = plus == std::string_view::npos ? std::string_view{} : tag.substr(plus + 1);
    }
    if (s.active_.none()) throw ConfigError("empty feature spec");
    return s;
  }

  bool has(Family f) const noexcept { return active_.test(static_cast<std::size_t>(f)); }
  bool empty() const noexcept { return active_.none(); }

  std::size_t dimension() const noexcept {
    std::size_t d = 0;
    for (std::size_t i = 0; i < kFamilyCount; ++i)
      if (active_.test(i)) d += kFamilyDims[i];
    return d;
  }

  // Preset name when the family set matches one, else the canonical '+' list.
  std::string tag() const {
    if (*this == baseline()) return "baseline";
    if (*this == advanced()) return "advanced";
    if (*this == mixed()) return "mixed";
    std::string out;
    for (std::size_t i = 0; i < kFamilyCount; ++i)
      if (active_.test(i)) {
        if (!out.empty()) out += '+';
        out += kFamilyNames[i];
      }
    return out;
  }

  // Column offset of a family inside the assembled vector.
  std::size_t offset_of(Family f) const noexcept {
    std::size_t d = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(f); ++i)
      if (active_.test(i)) d += kFamilyDims[i];
    return d;
  }

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;

 private:
  std::bitset<kFamilyCount> active_;
};

struct FeatureVector {
  std::vector<double> values;
  std::string spec_tag;
};

// phi(x): active families concatenated in canonical order. The grayscale
// image is computed at most once.
inline FeatureVector assemble_features(const ImageRecord& image, const FeatureSpec& spec) {
  FeatureVector out;
  out.spec_tag = spec.tag();
  out.values.reserve(spec.dimension());
  auto append = [&](const std::vector<double>& v) {
    out.values.insert(out.values.end(), v.begin(), v.end());
  };
  if (spec.has(Family::raw)) append(extract_raw(image));
  if (spec.has(Family::hist)) append(extract_hist(image));
  if (spec.has(Family::dct)) append(extract_dct(image));
  const bool needs_gray = spec.has(Family::hog) || spec.has(Family::lbp) ||
                          spec.has(Family::glcm) || spec.has(Family::wavelet);
  if (needs_gray) {
    const GrayImage gray = to_grayscale(image);
    if (spec.has(Family::hog)) append(extract_hog(gray));
    if (spec.has(Family::lbp)) append(extract_lbp(gray));
    if (spec.has(Family::glcm)) append(extract_glcm(gray));
    if (spec.has(Family::wavelet)) append(extract_wavelet(gray));
  }
  return out;
}

// One row per image, written to its own slot.
template <class T = float>
BasicMatrix<T> extract_matrix(std::span<const ImageRecord> images, const FeatureSpec& spec) {
  BasicMatrix<T> out(images.size(), spec.dimension());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto fv = assemble_features(images[i], spec);
    std::copy(fv.values.begin(), fv.values.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace fakery
