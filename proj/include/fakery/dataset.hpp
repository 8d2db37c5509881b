#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fakery/error.hpp"
#include "fakery/image.hpp"
#include "fakery/random.hpp"

namespace fakery {

struct LabeledPath {
  std::filesystem::path path;
  Label label = 0;

  friend bool operator==(const LabeledPath&, const LabeledPath&) = default;
};

struct SplitIndices {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;

  friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

inline constexpr std::array<std::string_view, 2> kSplitDirs{"train", "test"};
inline constexpr std::array<std::string_view, 2> kClassDirs{"REAL", "FAKE"};  // label 0, 1

namespace detail {

inline bool has_image_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace detail

// Lists images under root/{train,test}/{REAL,FAKE}. With `split` set, only
// that split directory is visited. Output is grouped by split, then class
// (REAL before FAKE), and sorted by path within each class directory.
inline std::vector<LabeledPath> scan_dataset(const std::filesystem::path& root,
                                             std::optional<std::string_view> split = {}) {
  namespace fs = std::filesystem;
  std::vector<LabeledPath> out;
  bool any_leaf = false;
  for (auto split_dir : kSplitDirs) {
    if (split && *split != split_dir) continue;
    for (std::size_t label = 0; label < kClassDirs.size(); ++label) {
      const fs::path leaf = root / split_dir / kClassDirs[label];
      if (!fs::is_directory(leaf)) continue;
      any_leaf = true;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(leaf))
        if (entry.is_regular_file() && detail::has_image_extension(entry.path()))
          files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (auto& f : files) out.push_back({std::move(f), static_cast<Label>(label)});
    }
  }
  if (!any_leaf)
    throw EmptyDatasetError(root.string() + ": no {train,test}/{REAL,FAKE} directories");
  if (out.empty()) throw EmptyDatasetError(root.string() + ": no images found");
  return out;
}

// Number of validation members drawn from a class of `class_total` items.
inline std::size_t validation_count(std::size_t class_total, double val_fraction) {
  const auto n = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(class_total)));
  return std::max<std::size_t>(1, n);
}

// Stratified shuffle split. Each class is shuffled with its own SplitMix64
// stream seeded by (seed ^ class id); the first validation_count() members
// go to validation. Both index lists come back sorted ascending.
inline SplitIndices stratified_split(std::span<const Label> labels, double val_fraction,
                                     std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw ConfigError("val_fraction must lie in (0, 1)");
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw ConfigError("labels must be 0 or 1");
    members[labels[i]].push_back(i);
  }
  SplitIndices out;
  for (std::size_t cls = 0; cls < members.size(); ++cls) {
    auto& idx = members[cls];
    if (idx.empty()) continue;
    if (idx.size() < 2)
      throw DegenerateClassError("class " + std::to_string(cls) + " has fewer than 2 members");
    SplitMix64 rng(seed ^ cls);
    shuffle(idx, rng);
    const std::size_t n_val = validation_count(idx.size(), val_fraction);
    out.val_idx.insert(out.val_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.train_idx.insert(out.train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  }
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.val_idx.begin(), out.val_idx.end());
  return out;
}

// Deterministic class-balanced subset of at most `limit` entries, keeping
// each class's share of the total. Order of the survivors is preserved.
inline std::vector<LabeledPath> limit_entries(const std::vector<LabeledPath>& entries,
                                              std::size_t limit, std::uint64_t seed) {
  if (limit == 0 || limit >= entries.size()) return entries;
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < entries.size(); ++i) members[entries[i].label].push_back(i);
  std::vector<std::size_t> keep;
  for (std::size_t cls = 0; cls < members.size(); ++cls) {
    auto& idx = members[cls];
    const auto quota = static_cast<std::size_t>(std::llround(
        static_cast<double>(limit) * static_cast<double>(idx.size()) /
        static_cast<double>(entries.size())));
    SplitMix64 rng(derive_seed(seed, 0x51AB + cls));
    shuffle(idx, rng);
    keep.insert(keep.end(), idx.begin(),
                idx.begin() + static_cast<std::ptrdiff_t>(std::min(quota, idx.size())));
  }
  std::sort(keep.begin(), keep.end());
  std::vector<LabeledPath> out;
  out.reserve(keep.size());
  for (auto i : keep) out.push_back(entries[i]);
  return out;
}

// Decodes every listed image and stamps the label from the directory.
inline std::vector<ImageRecord> load_images(std::span<const LabeledPath> entries) {
  std::vector<ImageRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    out.push_back(load_image(e.path));
    out.back().label = e.label;
  }
  return out;
}

}  // namespace fakery
