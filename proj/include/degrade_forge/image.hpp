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

#ifndef DEGRADE_FORGE_IMAGE_HPP_
#define DEGRADE_FORGE_IMAGE_HPP_

// Image container and the primitive operators every degradation builds on:
// reflect-padded 2D filtering, separable resampling, luma extraction and the
// Laplacian sharpness score.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degrade_forge/errors.hpp"

namespace degrade_forge {

// Row-major, channel-interleaved image. Samples nominally live in [0, 1].
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int height, int width, int channels, T fill = T(0))
      : height_(height), width_(width), channels_(channels) {
    if (height < 0 || width < 0 || channels < 1) {
      throw InvalidArgument("image: bad dimensions " + std::to_string(height) + "x" +
                            std::to_string(width) + "x" + std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

  T& operator()(int r, int c, int ch) { return data_[index(r, c, ch)]; }
  const T& operator()(int r, int c, int ch) const { return data_[index(r, c, ch)]; }

  T* row(int r) { return data_.data() + static_cast<std::size_t>(r) * width_ * channels_; }
  const T* row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * width_ * channels_;
  }

  std::span<T> samples() { return data_; }
  std::span<const T> samples() const { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int r, int c, int ch) const {
    return (static_cast<std::size_t>(r) * width_ + c) * channels_ + ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<T> data_;
};

using ImageF = Image<double>;

// Odd-sided, nonnegative filter whose weights sum to one.
class Kernel2D {
 public:
  static constexpr double kSumTolerance = 1e-8;

  Kernel2D() : Kernel2D(1, 1, {1.0}) {}

  Kernel2D(int rows, int cols, std::vector<double> weights)
      : rows_(rows), cols_(cols), weights_(std::move(weights)) {
    if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0) {
      throw InvalidArgument("kernel: sides must be odd and positive, got " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (weights_.size() != static_cast<std::size_t>(rows) * cols) {
      throw InvalidArgument("kernel: weight count does not match sides");
    }
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("kernel: negative or non-finite weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw InvalidArgument("kernel: weights sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  static Kernel2D delta(int side = 1) {
    std::vector<double> w(static_cast<std::size_t>(side) * side, 0.0);
    if (side >= 1) w[w.size() / 2] = 1.0;
    return Kernel2D(side, side, std::move(w));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int r, int c) const { return weights_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<const double> weights() const { return weights_; }

  double sum() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  // Weighted mean offset of the kernel mass from its center, as (dy, dx).
  std::pair<double, double> centroid() const {
    double sy = 0.0, sx = 0.0, s = 0.0;
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        const double w = (*this)(r, c);
        sy += w * (r - rows_ / 2);
        sx += w * (c - cols_ / 2);
        s += w;
      }
    }
    return {sy / s, sx / s};
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> weights_;
};

namespace detail {

// Mirror about the edge sample without repeating it: -1 -> 1, n -> n - 2.
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Half-sample symmetric mirror: -1 -> 0, n -> n - 1.
inline int reflect_symmetric(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace detail

// Filters every channel with `k` using reflect-101 padding. The kernel is
// applied as a correlation (not flipped), so a kernel whose mass sits at
// offset +d samples the input at +d.
template <typename T>
Image<T> convolve_reflect(const Image<T>& img, const Kernel2D& k) {
  if (img.empty()) throw InvalidArgument("convolve_reflect: empty image");
  const int h = img.height(), w = img.width(), ch = img.channels();
  if (k.rows() > 2 * h - 1 || k.cols() > 2 * w - 1) {
    throw InvalidArgument("convolve_reflect: kernel " + std::to_string(k.rows()) + "x" +
                          std::to_string(k.cols()) + " exceeds reflectable extent of " +
                          std::to_string(h) + "x" + std::to_string(w) + " image");
  }
  const int kr = k.rows() / 2, kc = k.cols() / 2;

  std::vector<int> col_index(static_cast<std::size_t>(w + 2 * kc));
  for (int c = -kc; c < w + kc; ++c) col_index[c + kc] = detail::reflect101(c, w);

  Image<T> out(h, w, ch);
  std::vector<double> acc(static_cast<std::size_t>(w) * ch);
  for (int r = 0; r < h; ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int i = 0; i < k.rows(); ++i) {
      const T* src = img.row(detail::reflect101(r + i - kr, h));
      for (int j = 0; j < k.cols(); ++j) {
        const double wgt = k(i, j);
        if (wgt == 0.0) continue;
        const int* cols = col_index.data() + j;
        for (int c = 0; c < w; ++c) {
          const T* px = src + static_cast<std::size_t>(cols[c]) * ch;
          double* a = acc.data() + static_cast<std::size_t>(c) * ch;
          for (int q = 0; q < ch; ++q) a[q] += wgt * static_cast<double>(px[q]);
        }
      }
    }
    T* dst = out.row(r);
    for (std::size_t q = 0; q < acc.size(); ++q) dst[q] = static_cast<T>(acc[q]);
  }
  return out;
}

enum class Interp { kNearest, kBilinear, kBicubic };

inline const char* to_string(Interp m) {
  switch (m) {
    case Interp::kNearest: return "nearest";
    case Interp::kBilinear: return "bilinear";
    case Interp::kBicubic: return "bicubic";
  }
  return "?";
}

inline Interp interp_from_string(const std::string& s) {
  if (s == "nearest") return Interp::kNearest;
  if (s == "bilinear") return Interp::kBilinear;
  if (s == "bicubic") return Interp::kBicubic;
  throw InvalidArgument("unknown interpolation method '" + s + "'");
}

namespace detail {

// Cubic convolution kernel with a = -0.5.
inline double cubic(double x) {
  const double ax = std::abs(x), ax2 = ax * ax, ax3 = ax2 * ax;
  if (ax <= 1.0) return 1.5 * ax3 - 2.5 * ax2 + 1.0;
  if (ax < 2.0) return -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0;
  return 0.0;
}

inline double triangle(double x) {
  const double ax = std::abs(x);
  return ax < 1.0 ? 1.0 - ax : 0.0;
}

inline double box(double x) { return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0; }

// Sparse 1D resampling matrix: output i reads taps [offset[i], offset[i+1]).
struct AxisWeights {
  std::vector<std::size_t> offset;
  std::vector<int> index;
  std::vector<double> weight;
};

inline AxisWeights axis_weights(int in_n, int out_n, Interp method, bool antialias) {
  AxisWeights aw;
  aw.offset.reserve(static_cast<std::size_t>(out_n) + 1);
  aw.offset.push_back(0);
  if (in_n == out_n) {
    for (int i = 0; i < out_n; ++i) {
      aw.index.push_back(i);
      aw.weight.push_back(1.0);
      aw.offset.push_back(aw.index.size());
    }
    return aw;
  }
  const double scale = static_cast<double>(out_n) / in_n;
  double (*kernel)(double) = method == Interp::kBicubic    ? cubic
                             : method == Interp::kBilinear ? triangle
                                                           : box;
  double support = method == Interp::kBicubic ? 4.0 : method == Interp::kBilinear ? 2.0 : 1.0;
  const bool stretch = antialias && scale < 1.0;
  if (stretch) support /= scale;

  for (int i = 0; i < out_n; ++i) {
    const double u = (i + 0.5) / scale - 0.5;
    const int left = static_cast<int>(std::floor(u - support / 2.0));
    const int taps = static_cast<int>(std::ceil(support)) + 2;
    const std::size_t begin = aw.index.size();
    double sum = 0.0;
    for (int p = 0; p < taps; ++p) {
      const int j = left + p;
      const double x = u - j;
      const double wgt = stretch ? scale * kernel(scale * x) : kernel(x);
      if (wgt == 0.0) continue;
      aw.index.push_back(reflect_symmetric(j, in_n));
      aw.weight.push_back(wgt);
      sum += wgt;
    }
    for (std::size_t t = begin; t < aw.weight.size(); ++t) aw.weight[t] /= sum;
    aw.offset.push_back(aw.index.size());
  }
  return aw;
}

}  // namespace detail

// Separable resampler with align-centers coordinates (pixel i of an n-pixel
// axis sits at (i + 0.5) / n). With `antialias`, downscaling stretches the
// interpolation kernel by 1/scale. Rows are resampled first, then columns.
template <typename T>
Image<T> resize(const Image<T>& img, int out_h, int out_w, Interp method, bool antialias = true) {
  if (out_h < 1 || out_w < 1) {
    throw InvalidArgument("resize: target " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                          " has a zero dimension");
  }
  if (img.empty()) throw InvalidArgument("resize: empty image");
  const int h = img.height(), w = img.width(), ch = img.channels();
  const auto wy = detail::axis_weights(h, out_h, method, antialias);
  const auto wx = detail::axis_weights(w, out_w, method, antialias);

  std::vector<double> tmp(static_cast<std::size_t>(out_h) * w * ch, 0.0);
  for (int i = 0; i < out_h; ++i) {
    double* dst = tmp.data() + static_cast<std::size_t>(i) * w * ch;
    for (std::size_t t = wy.offset[i]; t < wy.offset[i + 1]; ++t) {
      const T* src = img.row(wy.index[t]);
      const double wgt = wy.weight[t];
      for (int q = 0; q < w * ch; ++q) dst[q] += wgt * static_cast<double>(src[q]);
    }
  }

  Image<T> out(out_h, out_w, ch);
  for (int i = 0; i < out_h; ++i) {
    const double* src = tmp.data() + static_cast<std::size_t>(i) * w * ch;
    T* dst = out.row(i);
    for (int j = 0; j < out_w; ++j) {
      for (int q = 0; q < ch; ++q) {
        double acc = 0.0;
        for (std::size_t t = wx.offset[j]; t < wx.offset[j + 1]; ++t) {
          acc += wx.weight[t] * src[static_cast<std::size_t>(wx.index[t]) * ch + q];
        }
        dst[static_cast<std::size_t>(j) * ch + q] = static_cast<T>(acc);
      }
    }
  }
  return out;
}

// BT.601 studio-swing luma on unit-range RGB.
template <typename T>
Image<T> rgb_to_ycbcr_y(const Image<T>& img) {
  if (img.channels() != 3) {
    throw InvalidArgument("rgb_to_ycbcr_y: expected 3 channels, got " +
                          std::to_string(img.channels()));
  }
  Image<T> y(img.height(), img.width(), 1);
  for (int r = 0; r < img.height(); ++r) {
    const T* src = img.row(r);
    T* dst = y.row(r);
    for (int c = 0; c < img.width(); ++c) {
      const T* px = src + 3 * c;
      dst[c] = static_cast<T>((65.481 * px[0] + 128.553 * px[1] + 24.966 * px[2] + 16.0) / 255.0);
    }
  }
  return y;
}

enum class LaplacianDomain { kReflect, kInteriorOnly };

// Variance of the 4-neighbour Laplacian response. Colour input is reduced to
// luma first. kInteriorOnly skips the one-pixel border instead of padding.
template <typename T>
double laplacian_variance(const Image<T>& img, LaplacianDomain domain = LaplacianDomain::kReflect) {
  if (img.empty()) throw InvalidArgument("laplacian_variance: empty image");
  const Image<T> gray = img.channels() == 3 ? rgb_to_ycbcr_y(img) : img;
  if (gray.channels() != 1) throw InvalidArgument("laplacian_variance: expected 1 or 3 channels");
  const int h = gray.height(), w = gray.width();
  const int margin = domain == LaplacianDomain::kInteriorOnly ? 1 : 0;
  if (h - 2 * margin < 1 || w - 2 * margin < 1) return 0.0;
  auto at = [&](int r, int c) {
    return static_cast<double>(gray(detail::reflect101(r, h), detail::reflect101(c, w), 0));
  };
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (int r = margin; r < h - margin; ++r) {
    for (int c = margin; c < w - margin; ++c) {
      const double v = at(r - 1, c) + at(r + 1, c) + at(r, c - 1) + at(r, c + 1) - 4.0 * at(r, c);
      sum += v;
      sum2 += v * v;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  return std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
}

template <typename T>
void clamp01(Image<T>& img) {
  for (T& v : img.samples()) v = std::clamp(v, T(0), T(1));
}

template <typename T>
bool all_finite(const Image<T>& img) {
  return std::all_of(img.samples().begin(), img.samples().end(),
                     [](T v) { return std::isfinite(static_cast<double>(v)); });
}

template <typename T>
Image<T> crop(const Image<T>& img, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height < 0 || width < 0 || top + height > img.height() ||
      left + width > img.width()) {
    throw InvalidArgument("crop: window outside image");
  }
  Image<T> out(height, width, img.channels());
  const std::size_t row_len = static_cast<std::size_t>(width) * img.channels();
  for (int r = 0; r < height; ++r) {
    std::copy_n(img.row(top + r) + static_cast<std::size_t>(left) * img.channels(), row_len,
                out.row(r));
  }
  return out;
}

// Largest centered crop whose sides are multiples of `multiple`.
template <typename T>
Image<T> center_crop_to_multiple(const Image<T>& img, int multiple) {
  const int h = img.height() / multiple * multiple;
  const int w = img.width() / multiple * multiple;
  if (h < 1 || w < 1) {
    throw InvalidArgument("center_crop_to_multiple: image smaller than " + std::to_string(multiple));
  }
  return crop(img, (img.height() - h) / 2, (img.width() - w) / 2, h, w);
}

// Subsamples every `step`-th pixel starting at the origin.
template <typename T>
Image<T> stride_subsample(const Image<T>& img, int step) {
  if (step < 1) throw InvalidArgument("stride_subsample: step must be >= 1");
  const int h = img.height() / step, w = img.width() / step;
  if (h < 1 || w < 1) throw InvalidArgument("stride_subsample: output would be empty");
  Image<T> out(h, w, img.channels());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int q = 0; q < img.channels(); ++q) out(r, c, q) = img(r * step, c * step, q);
    }
  }
  return out;
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_IMAGE_HPP_
