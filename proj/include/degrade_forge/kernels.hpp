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

#ifndef DEGRADE_FORGE_KERNELS_HPP_
#define DEGRADE_FORGE_KERNELS_HPP_

// Gaussian blur kernel synthesis: isotropic, rotated anisotropic, and
// sub-pixel shifted, plus the sampler for blur parameters.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/rng.hpp"

namespace degrade_forge {

enum class BlurKind { kIso, kAniso };

inline const char* to_string(BlurKind k) { return k == BlurKind::kIso ? "iso" : "aniso"; }

struct BlurSpec {
  BlurKind kind = BlurKind::kIso;
  int size = 7;
  double sigma = 0.1;        // iso
  double sigma_major = 1.0;  // aniso, standard deviation along the rotated x axis
  double sigma_minor = 1.0;  // aniso, standard deviation along the rotated y axis
  double theta = 0.0;        // aniso, radians

  friend bool operator==(const BlurSpec&, const BlurSpec&) = default;
};

// Sampling ranges for one scale factor.
struct BlurRanges {
  int min_size = 7;
  int max_size = 21;
  double iso_sigma_min = 0.1;
  double iso_sigma_max = 2.4;
  double aniso_sigma_min = 0.5;
  double aniso_sigma_max = 6.0;

  static BlurRanges for_scale(int scale) {
    BlurRanges r;
    if (scale == 4) {
      r.iso_sigma_max = 2.8;
      r.aniso_sigma_max = 8.0;
    }
    return r;
  }

  friend bool operator==(const BlurRanges&, const BlurRanges&) = default;
};

namespace detail {

inline void check_odd_size(int size, const char* who) {
  if (size < 1 || size % 2 == 0) {
    throw InvalidArgument(std::string(who) + ": kernel size must be odd and positive, got " +
                          std::to_string(size));
  }
}

// Zeroes underflowed cells and normalizes to unit sum.
inline Kernel2D normalized(int size, std::vector<double> w) {
  double sum = 0.0;
  for (double& v : w) {
    if (v < std::numeric_limits<double>::min()) v = 0.0;
    sum += v;
  }
  if (!(sum > 0.0)) throw InvalidArgument("kernel: all weights underflowed");
  for (double& v : w) v /= sum;
  return Kernel2D(size, size, std::move(w));
}

}  // namespace detail

inline Kernel2D iso_gaussian(int size, double sigma) {
  detail::check_odd_size(size, "iso_gaussian");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("iso_gaussian: sigma must be positive, got " + std::to_string(sigma));
  }
  const int half = size / 2;
  const double denom = 2.0 * sigma * sigma;
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double y = r - half, x = c - half;
      w[static_cast<std::size_t>(r) * size + c] = std::exp(-(x * x + y * y) / denom);
    }
  }
  return detail::normalized(size, std::move(w));
}

// Gaussian with covariance R(theta) diag(major^2, minor^2) R(theta)^T, where
// x runs along columns and y along rows.
inline Kernel2D aniso_gaussian(int size, double sigma_major, double sigma_minor, double theta) {
  detail::check_odd_size(size, "aniso_gaussian");
  if (!(sigma_major > 0.0) || !(sigma_minor > 0.0) || !std::isfinite(sigma_major) ||
      !std::isfinite(sigma_minor)) {
    throw InvalidArgument("aniso_gaussian: sigmas must be positive");
  }
  if (!std::isfinite(theta)) throw InvalidArgument("aniso_gaussian: theta must be finite");
  const int half = size / 2;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double inv_a2 = 1.0 / (sigma_major * sigma_major);
  const double inv_b2 = 1.0 / (sigma_minor * sigma_minor);
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double x = c - half, y = r - half;
      const double along = ct * x + st * y;
      const double across = -st * x + ct * y;
      w[static_cast<std::size_t>(r) * size + c] =
          std::exp(-0.5 * (along * along * inv_a2 + across * across * inv_b2));
    }
  }
  return detail::normalized(size, std::move(w));
}

// Centered isotropic Gaussian moved by (dy, dx) pixels through bilinear
// resampling of its own grid, then renormalized.
inline Kernel2D shifted_iso_gaussian(int size, double sigma, double dy, double dx) {
  const double limit = size / 2.0 - 1.0;
  if (!(std::abs(dy) < limit) || !(std::abs(dx) < limit)) {
    throw InvalidArgument("shifted_iso_gaussian: shift (" + std::to_string(dy) + ", " +
                          std::to_string(dx) + ") too large for size " + std::to_string(size));
  }
  const Kernel2D base = iso_gaussian(size, sigma);
  auto at = [&](int r, int c) {
    return (r < 0 || c < 0 || r >= size || c >= size) ? 0.0 : base(r, c);
  };
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double y = r - dy, x = c - dx;
      const int y0 = static_cast<int>(std::floor(y)), x0 = static_cast<int>(std::floor(x));
      const double fy = y - y0, fx = x - x0;
      w[static_cast<std::size_t>(r) * size + c] =
          (1.0 - fy) * ((1.0 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
          fy * ((1.0 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
    }
  }
  return detail::normalized(size, std::move(w));
}

inline void validate(const BlurSpec& spec) {
  detail::check_odd_size(spec.size, "BlurSpec");
  if (spec.kind == BlurKind::kIso ? !(spec.sigma > 0.0)
                                  : !(spec.sigma_major > 0.0 && spec.sigma_minor > 0.0)) {
    throw InvalidArgument("BlurSpec: sigmas must be positive");
  }
}

inline Kernel2D make_kernel(const BlurSpec& spec) {
  validate(spec);
  return spec.kind == BlurKind::kIso
             ? iso_gaussian(spec.size, spec.sigma)
             : aniso_gaussian(spec.size, spec.sigma_major, spec.sigma_minor, spec.theta);
}

inline BlurSpec sample_blur_spec(const BlurRanges& ranges, BlurKind kind, Rng& rng) {
  BlurSpec spec;
  spec.kind = kind;
  const int steps = (ranges.max_size - ranges.min_size) / 2;
  spec.size = ranges.min_size + 2 * rng.uniform_int(0, steps);
  if (kind == BlurKind::kIso) {
    spec.sigma = rng.uniform(ranges.iso_sigma_min, ranges.iso_sigma_max);
  } else {
    spec.theta = rng.uniform(0.0, std::numbers::pi);
    spec.sigma_major = rng.uniform(ranges.aniso_sigma_min, ranges.aniso_sigma_max);
    spec.sigma_minor = rng.uniform(ranges.aniso_sigma_min, ranges.aniso_sigma_max);
  }
  return spec;
}

inline BlurSpec sample_blur_spec(int scale, BlurKind kind, Rng& rng) {
  if (scale != 2 && scale != 4) {
    throw InvalidArgument("sample_blur_spec: scale must be 2 or 4, got " + std::to_string(scale));
  }
  return sample_blur_spec(BlurRanges::for_scale(scale), kind, rng);
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_KERNELS_HPP_
