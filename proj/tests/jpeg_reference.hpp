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

#ifndef DEGRADE_FORGE_TESTS_JPEG_REFERENCE_HPP_
#define DEGRADE_FORGE_TESTS_JPEG_REFERENCE_HPP_

#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <vector>

namespace df_test {

// Annex K tables in natural order.
inline constexpr std::array<int, 64> kAnnexKLuma = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,  14, 13, 16, 24, 40,  57,
    69, 56, 14, 17, 22,  29,  51,  87,  80, 62, 18, 22, 37,  56,  68,  109, 103, 77, 24, 35, 55,  64,
    81, 104, 113, 92, 49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
inline constexpr std::array<int, 64> kAnnexKChroma = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// Encodes with libjpeg's own table scaling; the reference DQT source.
inline std::vector<std::uint8_t> reference_encode(const std::vector<std::uint8_t>& rgb, int h, int w, int quality) {
  jpeg_compress_struct cinfo{};
  jpeg_error_mgr jerr{};
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  unsigned char* buf = nullptr;
  unsigned long len = 0;
  jpeg_mem_dest(&cinfo, &buf, &len);
  cinfo.image_width = w;
  cinfo.image_height = h;
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(rgb.data() + static_cast<std::size_t>(cinfo.next_scanline) * w * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(buf, buf + len);
  std::free(buf);
  jpeg_destroy_compress(&cinfo);
  return out;
}

// Standalone DQT walker returning {table id -> 64 values in zigzag order}.
inline std::map<int, std::vector<int>> dqt_segments(const std::vector<std::uint8_t>& b) {
  std::map<int, std::vector<int>> out;
  std::size_t i = 2;
  while (i + 4 <= b.size() && b[i] == 0xFF && b[i + 1] != 0xDA) {
    const std::size_t len = b[i + 2] * 256 + b[i + 3];
    if (b[i + 1] == 0xDB) {
      std::size_t p = i + 4;
      while (p < i + 2 + len) {
        const int pq = b[p] >> 4, tq = b[p] & 15;
        ++p;
        std::vector<int> v;
        for (int k = 0; k < 64; ++k) {
          v.push_back(pq ? b[p] * 256 + b[p + 1] : b[p]);
          p += pq ? 2 : 1;
        }
        out[tq] = v;
      }
    }
    i += 2 + len;
  }
  return out;
}

// Zigzag order generated by walking anti-diagonals.
inline std::vector<int> zigzag_natural() {
  std::vector<int> z;
  for (int s = 0; s < 15; ++s) {
    std::vector<int> diag;
    for (int r = 0; r < 8; ++r) {
      const int c = s - r;
      if (c >= 0 && c < 8) diag.push_back(r * 8 + c);
    }
    if (s % 2 == 0) std::reverse(diag.begin(), diag.end());
    z.insert(z.end(), diag.begin(), diag.end());
  }
  return z;
}

inline int ijg_entry(int base, int q) {
  const int scale = q < 50 ? 5000 / q : 200 - 2 * q;
  return std::clamp((base * scale + 50) / 100, 1, 255);
}

}  // namespace df_test

#endif  // DEGRADE_FORGE_TESTS_JPEG_REFERENCE_HPP_
