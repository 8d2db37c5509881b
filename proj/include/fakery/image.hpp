#pragma once

// Decoding and encoding of 32x32 RGB images. Link against libpng and libjpeg.

#include <array>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "fakery/error.hpp"

namespace fakery {

inline constexpr std::size_t kImageSide = 32;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;
inline constexpr std::size_t kImageBytes = kImagePixels * 3;

using Label = std::uint8_t;  // 0 = real, 1 = synthetic

struct ImageRecord {
  std::array<std::uint8_t, kImageBytes> pixels{};  // row-major, RGB interleaved
  Label label = 0;
  std::string path;

  std::uint8_t at(std::size_t row, std::size_t col, std::size_t channel) const noexcept {
    return pixels[(row * kImageSide + col) * 3 + channel];
  }
  std::uint8_t& at(std::size_t row, std::size_t col, std::size_t channel) noexcept {
    return pixels[(row * kImageSide + col) * 3 + channel];
  }
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool is_png(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool is_jpeg(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

inline ImageRecord decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw DecodeError(name + ": " + image.message);
  if (image.width != kImageSide || image.height != kImageSide) {
    const auto w = image.width, h = image.height;
    png_image_free(&image);
    throw DimensionError(name + ": expected 32x32, got " + std::to_string(w) + "x" +
                         std::to_string(h));
  }
  // Grayscale and palette sources are expanded to RGB by libpng; alpha is
  // composited away against black.
  image.format = PNG_FORMAT_RGB;
  ImageRecord rec;
  if (!png_image_finish_read(&image, nullptr, rec.pixels.data(), 0, nullptr))
    throw DecodeError(name + ": " + image.message);
  return rec;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline ImageRecord decode_jpeg(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  ImageRecord rec;
  bool bad_size = false;
  JDIMENSION width = 0, height = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(name + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;  // grayscale replicated across channels
  jpeg_start_decompress(&cinfo);
  width = cinfo.output_width;
  height = cinfo.output_height;
  if (width != kImageSide || height != kImageSide || cinfo.output_components != 3) {
    bad_size = true;
    jpeg_abort_decompress(&cinfo);
  } else {
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = rec.pixels.data() + cinfo.output_scanline * kImageSide * 3;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
  }
  jpeg_destroy_decompress(&cinfo);
  if (bad_size)
    throw DimensionError(name + ": expected 32x32, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  return rec;
}

}  // namespace detail

// Decodes a PNG or JPEG file into a record. The label is left at 0; callers
// that know the class set it. Images that are not 32x32 are rejected, never
// resized.
inline ImageRecord load_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  ImageRecord rec;
  if (detail::is_png(bytes))
    rec = detail::decode_png(bytes, path.string());
  else if (detail::is_jpeg(bytes))
    rec = detail::decode_jpeg(bytes, path.string());
  else
    throw DecodeError(path.string() + ": not a PNG or JPEG file");
  rec.path = path.string();
  return rec;
}

// Writes the record's pixels as an 8-bit RGB PNG.
inline void write_png(const ImageRecord& rec, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = kImageSide;
  image.height = kImageSide;
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, rec.pixels.data(), 0, nullptr))
    throw IoError(path.string() + ": " + image.message);
}

}  // namespace fakery
