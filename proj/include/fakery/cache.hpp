#pragma once

// Binary feature cache.
//
//   offset  size         field
//   0       4            magic "HFFX"
//   4       4            version (u32, currently 1)
//   8       8            n_rows (u64)
//   16      8            n_cols (u64)
//   24      4            spec_tag byte length L (u32)
//   28      L            spec_tag, UTF-8, no terminator
//   28+L    n_rows       labels, one byte each
//   ...     4*rows*cols  features, IEEE-754 binary32, row-major
//
// All integers and floats are little-endian.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "fakery/error.hpp"
#include "fakery/image.hpp"
#include "fakery/matrix.hpp"

namespace fakery {

inline constexpr char kCacheMagic[4] = {'H', 'F', 'F', 'X'};
inline constexpr std::uint32_t kCacheVersion = 1;

struct FeatureCache {
  FloatMatrix features;
  std::vector<Label> labels;
  std::string spec_tag;
};

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <class U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

// Serializes to the on-disk layout. Values are narrowed to binary32.
template <class T>
std::string encode_cache(const BasicMatrix<T>& matrix, std::span<const Label> labels,
                         const std::string& spec_tag) {
  if (matrix.rows() != labels.size())
    throw LengthMismatchError("cache: " + std::to_string(matrix.rows()) + " rows but " +
                              std::to_string(labels.size()) + " labels");
  std::string out;
  out.reserve(28 + spec_tag.size() + labels.size() + 4 * matrix.data().size());
  out.append(kCacheMagic, 4);
  detail::put_le<std::uint32_t>(out, kCacheVersion);
  detail::put_le<std::uint64_t>(out, matrix.rows());
  detail::put_le<std::uint64_t>(out, matrix.cols());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec_tag.size()));
  out += spec_tag;
  for (auto l : labels) out.push_back(static_cast<char>(l));
  for (T v : matrix.data())
    detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

inline FeatureCache decode_cache(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCacheMagic, 4) != 0)
    throw FormatError("cache: bad magic");
  if (bytes.size() < 28) throw TruncationError("cache: header truncated");
  const auto* p = bytes.data();
  const auto version = detail::get_le<std::uint32_t>(p + 4);
  if (version != kCacheVersion)
    throw FormatError("cache: unsupported version " + std::to_string(version));
  const auto rows = detail::get_le<std::uint64_t>(p + 8);
  const auto cols = detail::get_le<std::uint64_t>(p + 16);
  const auto tag_len = detail::get_le<std::uint32_t>(p + 24);
  std::size_t offset = 28;
  if (bytes.size() < offset + tag_len) throw TruncationError("cache: spec tag truncated");
  FeatureCache out;
  out.spec_tag.assign(reinterpret_cast<const char*>(p + offset), tag_len);
  offset += tag_len;
  // Checked without forming rows * cols, which may overflow on a hostile header.
  const std::size_t remaining = bytes.size() - offset;
  if (rows > remaining ||
      (rows != 0 && cols > (remaining - rows) / 4 / rows))
    throw TruncationError("cache: payload shorter than header promises");
  out.labels.assign(p + offset, p + offset + rows);
  offset += rows;
  std::vector<float> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i, offset += 4)
    data[i] = std::bit_cast<float>(detail::get_le<std::uint32_t>(p + offset));
  out.features = FloatMatrix(rows, cols, std::move(data));
  return out;
}

// Writes to a sibling temp file and renames it into place.
template <class T>
void write_cache(const BasicMatrix<T>& matrix, std::span<const Label> labels,
                 const std::string& spec_tag, const std::filesystem::path& path) {
  const std::string bytes = encode_cache(matrix, labels, spec_tag);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CacheHeader {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::string spec_tag;
};

// Reads only the fixed header and spec tag.
inline CacheHeader read_cache_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  unsigned char head[28] = {};
  in.read(reinterpret_cast<char*>(head), sizeof head);
  if (in.gcount() < 4 || std::memcmp(head, kCacheMagic, 4) != 0) throw FormatError("cache: bad magic");
  if (in.gcount() < 28) throw TruncationError("cache: header truncated");
  if (detail::get_le<std::uint32_t>(head + 4) != kCacheVersion) throw FormatError("cache: unsupported version");
  CacheHeader h;
  h.rows = detail::get_le<std::uint64_t>(head + 8);
  h.cols = detail::get_le<std::uint64_t>(head + 16);
  h.spec_tag.resize(detail::get_le<std::uint32_t>(head + 24));
  in.read(h.spec_tag.data(), static_cast<std::streamsize>(h.spec_tag.size()));
  if (static_cast<std::size_t>(in.gcount()) != h.spec_tag.size()) throw TruncationError("cache: spec tag truncated");
  return h;
}

inline FeatureCache read_cache(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return decode_cache(bytes);
}

}  // namespace fakery
