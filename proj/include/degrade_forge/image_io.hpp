// Copyright (c) the degrade-forge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEGRADE_FORGE_IMAGE_IO_HPP_
#define DEGRADE_FORGE_IMAGE_IO_HPP_

// PNG (libpng) and JPEG file I/O. 8-bit samples map to value / 255.

#include <png.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/jpeg.hpp"

namespace degrade_forge {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CodecError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw JobError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw JobError("short write to " + path.string());
}

inline bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

inline bool is_png(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return b.size() >= 8 && std::equal(sig, sig + 8, b.begin());
}

inline ImageF decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw CodecError(std::string("png: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, px.data(), 0, nullptr)) {
    png_image_free(&image);
    throw CodecError(std::string("png: ") + image.message);
  }
  return from_u8(px, static_cast<int>(image.height), static_cast<int>(image.width), 3);
}

inline std::vector<std::uint8_t> encode_png(const ImageF& img) {
  if (img.channels() != 1 && img.channels() != 3) throw CodecError("png: expected 1 or 3 channels");
  const auto px = quantize_u8(img);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, px.data(), 0, nullptr)) {
    throw CodecError(std::string("png: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, px.data(), 0, nullptr)) {
    throw CodecError(std::string("png: ") + image.message);
  }
  out.resize(size);
  return out;
}

// Decodes PNG or JPEG content; the result always has three channels.
inline ImageF decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) {
    const auto dec = decode_jpeg(bytes);
    ImageF img = from_u8(dec.pixels, dec.height, dec.width, dec.channels);
    if (img.channels() == 3) return img;
    ImageF rgb(img.height(), img.width(), 3);
    for (int r = 0; r < img.height(); ++r)
      for (int c = 0; c < img.width(); ++c)
        for (int q = 0; q < 3; ++q) rgb(r, c, q) = img(r, c, 0);
    return rgb;
  }
  throw CodecError("unrecognized image format");
}

inline ImageF read_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file_bytes(path));
  } catch (const CodecError& e) {
    throw CodecError(path.string() + ": " + e.what());
  }
}

inline void write_png(const std::filesystem::path& path, const ImageF& img) {
  write_file_bytes(path, encode_png(img));
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_IMAGE_IO_HPP_
