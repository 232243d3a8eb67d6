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

#ifndef DEGRADE_FORGE_JPEG_HPP_
#define DEGRADE_FORGE_JPEG_HPP_

// Baseline JFIF encoder (Huffman tables from Annex K, IJG quality scaling,
// 4:2:0 chroma) and a libjpeg-backed decoder. The encoder is deterministic
// and reentrant; every call owns its own state.

#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"

namespace degrade_forge {

using QuantTable = std::array<std::uint16_t, 64>;  // natural (row-major) order

namespace jpeg_detail {

// zigzag position -> natural index
inline constexpr std::array<int, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,  12, 19, 26, 33, 40, 48,
    41, 34, 27, 20, 13, 6,  7,  14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23,
    30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

inline constexpr QuantTable kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr QuantTable kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

struct HuffSpec {
  std::array<std::uint8_t, 16> bits;
  std::vector<std::uint8_t> vals;
};

inline const HuffSpec& dc_luma() {
  static const HuffSpec s{{0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
                          {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return s;
}

inline const HuffSpec& dc_chroma() {
  static const HuffSpec s{{0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
                          {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return s;
}

inline const HuffSpec& ac_luma() {
  static const HuffSpec s{
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61,
       0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52,
       0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25,
       0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45,
       0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64,
       0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83,
       0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99,
       0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
       0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3,
       0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8,
       0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return s;
}

inline const HuffSpec& ac_chroma() {
  static const HuffSpec s{
      {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77},
      {0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61,
       0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33,
       0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18,
       0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44,
       0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63,
       0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a,
       0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97,
       0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4,
       0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca,
       0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7,
       0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return s;
}

struct HuffCode {
  std::uint16_t code = 0;
  std::uint8_t length = 0;
};

using HuffTable = std::array<HuffCode, 256>;

// Canonical code assignment (Annex C).
inline HuffTable build_codes(const HuffSpec& spec) {
  HuffTable table{};
  std::uint16_t code = 0;
  std::size_t k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < spec.bits[len - 1]; ++i) table[spec.vals[k++]] = {code++, static_cast<std::uint8_t>(len)};
    code <<= 1;
  }
  return table;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint32_t bits, int count) {
    for (int i = count - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((bits >> i) & 1u));
      if (++filled_ == 8) emit();
    }
  }

  // Pads the last partial byte with one-bits.
  void flush() {
    while (filled_ != 0) put(1, 1);
  }

 private:
  void emit() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    filled_ = 0;
  }

  std::vector<std::uint8_t>& out_;
  std::uint8_t acc_ = 0;
  int filled_ = 0;
};

inline int magnitude_bits(int v) {
  int a = v < 0 ? -v : v, n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

struct DctBasis {
  std::array<double, 64> c{};  // c[u * 8 + x]
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      for (int x = 0; x < 8; ++x) c[u * 8 + x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
  }
};

inline const DctBasis& dct_basis() {
  static const DctBasis b;
  return b;
}

// Orthonormal 8x8 forward DCT of level-shifted samples.
inline std::array<double, 64> fdct(const std::array<double, 64>& block) {
  const auto& c = dct_basis().c;
  std::array<double, 64> tmp{}, out{};
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += c[u * 8 + y] * block[y * 8 + x];
      tmp[u * 8 + x] = s;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += tmp[u * 8 + x] * c[v * 8 + x];
      out[u * 8 + v] = s;
    }
  return out;
}

struct Plane {
  int height = 0, width = 0;
  std::vector<double> v;
  double at(int r, int c) const {
    r = std::min(r, height - 1);
    c = std::min(c, width - 1);
    return v[static_cast<std::size_t>(r) * width + c];
  }
};

inline void put_u16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

inline void put_marker(std::vector<std::uint8_t>& out, std::uint8_t m) {
  out.push_back(0xFF);
  out.push_back(m);
}

}  // namespace jpeg_detail

// IJG quality -> percentage scale: 5000/Q below 50, 200 - 2Q otherwise.
inline int jpeg_quality_scale(int quality) {
  quality = std::clamp(quality, 1, 100);
  return quality < 50 ? 5000 / quality : 200 - 2 * quality;
}

// Baseline table for `quality`: clamp((base * scale + 50) / 100, 1, 255).
inline QuantTable scaled_quant_table(const QuantTable& base, int quality) {
  const long scale = jpeg_quality_scale(quality);
  QuantTable out{};
  for (std::size_t i = 0; i < 64; ++i) {
    const long t = (static_cast<long>(base[i]) * scale + 50L) / 100L;
    out[i] = static_cast<std::uint16_t>(std::clamp(t, 1L, 255L));
  }
  return out;
}

inline QuantTable luma_quant_table(int quality) {
  return scaled_quant_table(jpeg_detail::kLumaBase, quality);
}
inline QuantTable chroma_quant_table(int quality) {
  return scaled_quant_table(jpeg_detail::kChromaBase, quality);
}

// Encodes 8-bit samples (1 or 3 interleaved channels) as baseline JFIF.
// Colour images use 4:2:0 chroma subsampling.
inline std::vector<std::uint8_t> encode_jpeg(std::span<const std::uint8_t> pixels, int height,
                                             int width, int channels, int quality) {
  using namespace jpeg_detail;
  if (height < 1 || width < 1 || height > 65535 || width > 65535) {
    throw InvalidArgument("encode_jpeg: unsupported dimensions");
  }
  if (channels != 1 && channels != 3) throw InvalidArgument("encode_jpeg: expected 1 or 3 channels");
  if (pixels.size() != static_cast<std::size_t>(height) * width * channels) {
    throw InvalidArgument("encode_jpeg: pixel buffer size mismatch");
  }
  if (quality < 1 || quality > 100) throw InvalidArgument("encode_jpeg: quality out of range");

  const bool color = channels == 3;
  const std::array<QuantTable, 2> qt = {luma_quant_table(quality), chroma_quant_table(quality)};

  // Colour conversion (JFIF full-range YCbCr) and level shift.
  std::vector<Plane> planes(static_cast<std::size_t>(channels));
  for (auto& p : planes) {
    p.height = height;
    p.width = width;
    p.v.resize(static_cast<std::size_t>(height) * width);
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(height) * width; ++i) {
    if (color) {
      const double r = pixels[3 * i], g = pixels[3 * i + 1], b = pixels[3 * i + 2];
      planes[0].v[i] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
      planes[1].v[i] = -0.168735892 * r - 0.331264108 * g + 0.5 * b;
      planes[2].v[i] = 0.5 * r - 0.418687589 * g - 0.081312411 * b;
    } else {
      planes[0].v[i] = pixels[i] - 128.0;
    }
  }
  if (color) {
    // 2x2 box average for chroma; edge samples replicated.
    for (int k = 1; k < 3; ++k) {
      Plane sub;
      sub.height = (height + 1) / 2;
      sub.width = (width + 1) / 2;
      sub.v.resize(static_cast<std::size_t>(sub.height) * sub.width);
      for (int r = 0; r < sub.height; ++r)
        for (int c = 0; c < sub.width; ++c)
          sub.v[static_cast<std::size_t>(r) * sub.width + c] =
              0.25 * (planes[k].at(2 * r, 2 * c) + planes[k].at(2 * r, 2 * c + 1) +
                      planes[k].at(2 * r + 1, 2 * c) + planes[k].at(2 * r + 1, 2 * c + 1));
      planes[k] = std::move(sub);
    }
  }

  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(height) * width / 2 + 1024);

  put_marker(out, 0xD8);  // SOI
  put_marker(out, 0xE0);  // APP0 / JFIF 1.01, square pixels
  put_u16(out, 16);
  for (char ch : std::string("JFIF")) out.push_back(static_cast<std::uint8_t>(ch));
  out.insert(out.end(), {0x00, 0x01, 0x01, 0x00});
  put_u16(out, 1);
  put_u16(out, 1);
  out.insert(out.end(), {0x00, 0x00});

  const int tables = color ? 2 : 1;
  for (int t = 0; t < tables; ++t) {
    put_marker(out, 0xDB);  // DQT
    put_u16(out, 2 + 65);
    out.push_back(static_cast<std::uint8_t>(t));
    for (int k = 0; k < 64; ++k) out.push_back(static_cast<std::uint8_t>(qt[t][kZigzag[k]]));
  }

  put_marker(out, 0xC0);  // SOF0
  put_u16(out, 8 + 3 * channels);
  out.push_back(8);
  put_u16(out, height);
  put_u16(out, width);
  out.push_back(static_cast<std::uint8_t>(channels));
  for (int k = 0; k < channels; ++k) {
    out.push_back(static_cast<std::uint8_t>(k + 1));
    out.push_back(color && k == 0 ? 0x22 : 0x11);
    out.push_back(k == 0 ? 0 : 1);
  }

  const std::array<const HuffSpec*, 4> specs = {&dc_luma(), &ac_luma(), &dc_chroma(), &ac_chroma()};
  const std::array<std::uint8_t, 4> classes = {0x00, 0x10, 0x01, 0x11};
  for (int t = 0; t < (color ? 4 : 2); ++t) {
    put_marker(out, 0xC4);  // DHT
    put_u16(out, 2 + 1 + 16 + static_cast<int>(specs[t]->vals.size()));
    out.push_back(classes[t]);
    out.insert(out.end(), specs[t]->bits.begin(), specs[t]->bits.end());
    out.insert(out.end(), specs[t]->vals.begin(), specs[t]->vals.end());
  }

  put_marker(out, 0xDA);  // SOS
  put_u16(out, 6 + 2 * channels);
  out.push_back(static_cast<std::uint8_t>(channels));
  for (int k = 0; k < channels; ++k) {
    out.push_back(static_cast<std::uint8_t>(k + 1));
    out.push_back(k == 0 ? 0x00 : 0x11);
  }
  out.insert(out.end(), {0x00, 0x3F, 0x00});

  const std::array<HuffTable, 4> codes = {build_codes(dc_luma()), build_codes(ac_luma()),
                                          build_codes(dc_chroma()), build_codes(ac_chroma())};
  BitWriter bw(out);
  std::array<int, 3> last_dc = {0, 0, 0};

  auto encode_block = [&](int comp, const Plane& p, int top, int left) {
    std::array<double, 64> block{};
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) block[y * 8 + x] = p.at(top + y, left + x);
    const auto coef = fdct(block);
    const QuantTable& q = qt[comp == 0 ? 0 : 1];
    std::array<int, 64> zz{};
    for (int k = 0; k < 64; ++k) {
      const int n = kZigzag[k];
      zz[k] = static_cast<int>(std::lround(coef[n] / q[n]));
    }
    const HuffTable& dc = codes[comp == 0 ? 0 : 2];
    const HuffTable& ac = codes[comp == 0 ? 1 : 3];

    const int diff = zz[0] - last_dc[comp];
    last_dc[comp] = zz[0];
    const int dc_bits = magnitude_bits(diff);
    bw.put(dc[dc_bits].code, dc[dc_bits].length);
    if (dc_bits) bw.put(static_cast<std::uint32_t>(diff < 0 ? diff - 1 : diff), dc_bits);

    int run = 0;
    for (int k = 1; k < 64; ++k) {
      if (zz[k] == 0) {
        ++run;
        continue;
      }
      while (run > 15) {
        bw.put(ac[0xF0].code, ac[0xF0].length);
        run -= 16;
      }
      const int bits = magnitude_bits(zz[k]);
      const int sym = (run << 4) | bits;
      bw.put(ac[sym].code, ac[sym].length);
      bw.put(static_cast<std::uint32_t>(zz[k] < 0 ? zz[k] - 1 : zz[k]), bits);
      run = 0;
    }
    if (run > 0) bw.put(ac[0x00].code, ac[0x00].length);
  };

  const int mcu = color ? 16 : 8;
  for (int my = 0; my < (height + mcu - 1) / mcu; ++my) {
    for (int mx = 0; mx < (width + mcu - 1) / mcu; ++mx) {
      if (color) {
        for (int by = 0; by < 2; ++by)
          for (int bx = 0; bx < 2; ++bx) encode_block(0, planes[0], my * 16 + by * 8, mx * 16 + bx * 8);
        encode_block(1, planes[1], my * 8, mx * 8);
        encode_block(2, planes[2], my * 8, mx * 8);
      } else {
        encode_block(0, planes[0], my * 8, mx * 8);
      }
    }
  }
  bw.flush();
  put_marker(out, 0xD9);  // EOI
  return out;
}

struct DecodedJpeg {
  int height = 0, width = 0, channels = 0;
  std::vector<std::uint8_t> pixels;
};

namespace jpeg_detail {

struct ErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void on_message(j_common_ptr, int) {}

}  // namespace jpeg_detail

// Decodes any baseline/progressive JPEG to 8-bit samples via libjpeg
// (integer IDCT). Colour output is RGB; grayscale stays single-channel.
inline DecodedJpeg decode_jpeg(std::span<const std::uint8_t> bytes) {
  using namespace jpeg_detail;
  if (bytes.size() < 4) throw CodecError("decode_jpeg: stream too short");
  jpeg_decompress_struct cinfo{};
  ErrorManager err{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = on_error;
  err.pub.emit_message = on_message;
  DecodedJpeg out;
  // Heap-held so the buffer survives a longjmp intact.
  const auto holder = std::make_unique<std::vector<std::uint8_t>>();
  std::vector<std::uint8_t>& pixels = *holder;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw CodecError(std::string("decode_jpeg: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int h = static_cast<int>(cinfo.output_height), w = static_cast<int>(cinfo.output_width);
  const int ch = cinfo.output_components;
  pixels.resize(static_cast<std::size_t>(h) * w * ch);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * ch;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  out.height = h;
  out.width = w;
  out.channels = ch;
  out.pixels = std::move(pixels);
  return out;
}

// Quantization tables carried by a JPEG stream's DQT segments, indexed by
// table id, in natural order.
inline std::vector<std::pair<int, QuantTable>> read_quant_tables(std::span<const std::uint8_t> bytes) {
  std::vector<std::pair<int, QuantTable>> tables;
  std::size_t i = 2;
  while (i + 4 <= bytes.size()) {
    if (bytes[i] != 0xFF) throw CodecError("read_quant_tables: marker expected");
    const std::uint8_t marker = bytes[i + 1];
    if (marker == 0xDA || marker == 0xD9) break;
    const std::size_t len = (static_cast<std::size_t>(bytes[i + 2]) << 8) | bytes[i + 3];
    if (i + 2 + len > bytes.size()) throw CodecError("read_quant_tables: truncated segment");
    if (marker == 0xDB) {
      std::size_t p = i + 4;
      while (p < i + 2 + len) {
        const int precision = bytes[p] >> 4, id = bytes[p] & 0x0F;
        ++p;
        QuantTable t{};
        for (int k = 0; k < 64; ++k) {
          int v = bytes[p++];
          if (precision) v = (v << 8) | bytes[p++];
          t[jpeg_detail::kZigzag[k]] = static_cast<std::uint16_t>(v);
        }
        tables.emplace_back(id, t);
      }
    }
    i += 2 + len;
  }
  return tables;
}

inline std::vector<std::uint8_t> quantize_u8(const ImageF& img) {
  std::vector<std::uint8_t> out(img.size());
  auto s = img.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(s[i], 0.0, 1.0) * 255.0));
  }
  return out;
}

inline ImageF from_u8(std::span<const std::uint8_t> px, int height, int width, int channels) {
  ImageF img(height, width, channels);
  auto s = img.samples();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = px[i] / 255.0;
  return img;
}

struct JpegRoundTrip {
  ImageF image;
  std::vector<std::uint8_t> bytes;
};

inline JpegRoundTrip jpeg_round_trip(const ImageF& img, int quality) {
  const auto px = quantize_u8(img);
  auto bytes = encode_jpeg(px, img.height(), img.width(), img.channels(), quality);
  const auto dec = decode_jpeg(bytes);
  if (dec.height != img.height() || dec.width != img.width() || dec.channels != img.channels()) {
    throw CodecError("jpeg_round_trip: decoded shape differs from input");
  }
  return {from_u8(dec.pixels, dec.height, dec.width, dec.channels), std::move(bytes)};
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_JPEG_HPP_
