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

#ifndef DEGRADE_FORGE_DEGRADATIONS_HPP_
#define DEGRADE_FORGE_DEGRADATIONS_HPP_

// Individual degradation operators: blur, the four downsamplers (plus the
// plain strided subsampler of the classical model), cross-channel Gaussian
// noise and JPEG compression noise.

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/jpeg.hpp"
#include "degrade_forge/kernels.hpp"
#include "degrade_forge/mat3.hpp"
#include "degrade_forge/rng.hpp"

namespace degrade_forge {

// ---------------------------------------------------------------------------
// Blur

inline ImageF apply_blur(const ImageF& img, const BlurSpec& spec) {
  ImageF out = convolve_reflect(img, make_kernel(spec));
  clamp01(out);
  return out;
}

// ---------------------------------------------------------------------------
// Downsampling

enum class DownMethod { kNearest, kBilinear, kBicubic, kDownUp, kStride };

inline const char* to_string(DownMethod m) {
  switch (m) {
    case DownMethod::kNearest: return "nearest";
    case DownMethod::kBilinear: return "bilinear";
    case DownMethod::kBicubic: return "bicubic";
    case DownMethod::kDownUp: return "down_up";
    case DownMethod::kStride: return "stride";
  }
  return "?";
}

inline DownMethod down_method_from_string(const std::string& s) {
  if (s == "nearest") return DownMethod::kNearest;
  if (s == "bilinear") return DownMethod::kBilinear;
  if (s == "bicubic") return DownMethod::kBicubic;
  if (s == "down_up") return DownMethod::kDownUp;
  if (s == "stride") return DownMethod::kStride;
  throw InvalidArgument("unknown downsampling method '" + s + "'");
}

struct DownSpec {
  DownMethod method = DownMethod::kBicubic;
  int scale = 2;
  double a = 1.0;                        // down_up: stage 1 scales by a/s, stage 2 by 1/a
  Interp stage1 = Interp::kBicubic;      // down_up
  Interp stage2 = Interp::kBicubic;      // down_up
  double pre_blur_sigma = 0.1;           // nearest

  friend bool operator==(const DownSpec&, const DownSpec&) = default;
};

// Size of the pre-blur kernel used by shift-corrected nearest downsampling.
inline constexpr int kNearestKernelSize = 21;

inline void validate(const DownSpec& spec) {
  if (spec.scale < 1) throw InvalidArgument("DownSpec: scale must be >= 1");
  if (spec.method == DownMethod::kDownUp && !(spec.a >= 0.5 && spec.a <= spec.scale)) {
    throw InvalidArgument("DownSpec: down_up factor a=" + std::to_string(spec.a) +
                          " outside [1/2, s]");
  }
  if (spec.method == DownMethod::kNearest &&
      !(spec.pre_blur_sigma >= 0.1 && spec.pre_blur_sigma <= 0.6 * spec.scale)) {
    throw InvalidArgument("DownSpec: nearest pre-blur sigma=" + std::to_string(spec.pre_blur_sigma) +
                          " outside [0.1, 0.6 s]");
  }
}

inline std::pair<int, int> downsampled_size(int h, int w, int scale) { return {h / scale, w / scale}; }

// Intermediate size after the first down_up stage.
inline std::pair<int, int> down_up_mid_size(int h, int w, const DownSpec& spec) {
  const double f = spec.a / spec.scale;
  return {std::max(1, static_cast<int>(std::lround(h * f))),
          std::max(1, static_cast<int>(std::lround(w * f)))};
}

inline Kernel2D nearest_pre_blur_kernel(const DownSpec& spec) {
  const double shift = 0.5 * (spec.scale - 1);
  return shifted_iso_gaussian(kNearestKernelSize, spec.pre_blur_sigma, shift, shift);
}

inline ImageF down_up_stage1(const ImageF& img, const DownSpec& spec) {
  const auto [h, w] = down_up_mid_size(img.height(), img.width(), spec);
  return resize(img, h, w, spec.stage1, true);
}

inline ImageF down_up_stage2(const ImageF& img, const DownSpec& spec, int out_h, int out_w) {
  return resize(img, out_h, out_w, spec.stage2, true);
}

inline ImageF downsample(const ImageF& img, const DownSpec& spec) {
  validate(spec);
  const auto [oh, ow] = downsampled_size(img.height(), img.width(), spec.scale);
  if (oh < 1 || ow < 1) {
    throw InvalidArgument("downsample: " + std::to_string(img.height()) + "x" +
                          std::to_string(img.width()) + " by " + std::to_string(spec.scale) +
                          " leaves an empty image");
  }
  switch (spec.method) {
    case DownMethod::kNearest:
      return stride_subsample(convolve_reflect(img, nearest_pre_blur_kernel(spec)), spec.scale);
    case DownMethod::kStride:
      return stride_subsample(img, spec.scale);
    case DownMethod::kBilinear:
      return resize(img, oh, ow, Interp::kBilinear, true);
    case DownMethod::kBicubic:
      return resize(img, oh, ow, Interp::kBicubic, true);
    case DownMethod::kDownUp:
      return down_up_stage2(down_up_stage1(img, spec), spec, oh, ow);
  }
  throw InvalidArgument("downsample: unknown method");
}

// ---------------------------------------------------------------------------
// Gaussian noise

enum class NoiseMode { kGeneral, kChannelIndependent, kGray };

inline const char* to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::kGeneral: return "general";
    case NoiseMode::kChannelIndependent: return "channel_independent";
    case NoiseMode::kGray: return "gray";
  }
  return "?";
}

inline NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "general") return NoiseMode::kGeneral;
  if (s == "channel_independent") return NoiseMode::kChannelIndependent;
  if (s == "gray") return NoiseMode::kGray;
  throw InvalidArgument("unknown noise mode '" + s + "'");
}

struct GaussianNoiseSpec {
  NoiseMode mode = NoiseMode::kChannelIndependent;
  double sigma = 0.0;
  Mat3 covariance{};

  friend bool operator==(const GaussianNoiseSpec&, const GaussianNoiseSpec&) = default;
};

inline GaussianNoiseSpec channel_independent_noise(double sigma) {
  const double v = sigma * sigma;
  return {NoiseMode::kChannelIndependent, sigma, {v, 0, 0, 0, v, 0, 0, 0, v}};
}

inline GaussianNoiseSpec gray_noise(double sigma) {
  const double v = sigma * sigma;
  return {NoiseMode::kGray, sigma, {v, v, v, v, v, v, v, v, v}};
}

// sigma^2 * 3 G / trace(G) with G = M^T M for a standard normal 3x3 M, so the
// mean per-channel variance equals sigma^2.
inline Mat3 sample_general_covariance(double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw InvalidArgument("sample_general_covariance: sigma must be positive");
  Mat3 m{};
  for (double& v : m) v = rng.normal();
  Mat3 g{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m[k * 3 + i] * m[k * 3 + j];
      g[i * 3 + j] = g[j * 3 + i] = s;
    }
  }
  const double scale = 3.0 * sigma * sigma / (g[0] + g[4] + g[8]);
  for (double& v : g) v *= scale;
  return g;
}

inline GaussianNoiseSpec general_noise(double sigma, Rng& rng) {
  return {NoiseMode::kGeneral, sigma, sample_general_covariance(sigma, rng)};
}

// Lower-triangular L with L L^T = cov. Semidefinite input is accepted: a
// vanishing pivot zeroes its column.
inline Mat3 psd_factor(const Mat3& cov) {
  const double tol = 1e-10 * std::max(1e-300, std::abs(cov[0]) + std::abs(cov[4]) + std::abs(cov[8]));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < i; ++j) {
      if (!(std::abs(cov[i * 3 + j] - cov[j * 3 + i]) <= tol)) {
        throw InvalidArgument("noise covariance is not symmetric");
      }
    }
  }
  Mat3 l{};
  for (int j = 0; j < 3; ++j) {
    double d = cov[j * 3 + j];
    for (int k = 0; k < j; ++k) d -= l[j * 3 + k] * l[j * 3 + k];
    if (d < -tol || !std::isfinite(d)) throw InvalidArgument("noise covariance is not positive semidefinite");
    if (d <= tol) {
      for (int i = j + 1; i < 3; ++i) {
        double r = cov[i * 3 + j];
        for (int k = 0; k < j; ++k) r -= l[i * 3 + k] * l[j * 3 + k];
        if (std::abs(r) > std::sqrt(tol * (cov[0] + cov[4] + cov[8]))) {
          throw InvalidArgument("noise covariance is not positive semidefinite");
        }
      }
      continue;
    }
    const double root = std::sqrt(d);
    l[j * 3 + j] = root;
    for (int i = j + 1; i < 3; ++i) {
      double r = cov[i * 3 + j];
      for (int k = 0; k < j; ++k) r -= l[i * 3 + k] * l[j * 3 + k];
      l[i * 3 + j] = r / root;
    }
  }
  return l;
}

// Adds one N(0, covariance) draw per pixel and clamps to [0, 1].
inline ImageF add_gaussian_noise(const ImageF& img, const GaussianNoiseSpec& spec, Rng& rng) {
  if (img.channels() != 3) throw InvalidArgument("add_gaussian_noise: expected 3 channels");
  const Mat3 l = psd_factor(spec.covariance);
  ImageF out = img;
  auto s = out.samples();
  for (std::size_t p = 0; p < s.size(); p += 3) {
    const double z0 = rng.normal(), z1 = rng.normal(), z2 = rng.normal();
    s[p] = std::clamp(s[p] + l[0] * z0, 0.0, 1.0);
    s[p + 1] = std::clamp(s[p + 1] + l[3] * z0 + l[4] * z1, 0.0, 1.0);
    s[p + 2] = std::clamp(s[p + 2] + l[6] * z0 + l[7] * z1 + l[8] * z2, 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JPEG compression noise

struct JpegSpec {
  int quality = 95;

  friend bool operator==(const JpegSpec&, const JpegSpec&) = default;
};

inline ImageF jpeg_noise(const ImageF& img, const JpegSpec& spec) {
  if (spec.quality < 1 || spec.quality > 100) {
    throw InvalidArgument("jpeg_noise: quality " + std::to_string(spec.quality) + " out of range");
  }
  return jpeg_round_trip(img, spec.quality).image;
}

// ---------------------------------------------------------------------------
// Noise parameter sampling

struct NoiseConfig {
  std::array<double, 3> mode_probs = {0.2, 0.4, 0.4};  // general, channel-independent, gray
  int sigma_level_min = 1;                             // sigma = level / 255
  int sigma_level_max = 25;
  double inner_jpeg_prob = 0.75;
  int quality_min = 30;
  int quality_max = 95;

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

inline GaussianNoiseSpec sample_gaussian_noise_spec(const NoiseConfig& cfg, Rng& rng) {
  const double u = rng.uniform();
  const double sigma = rng.uniform_int(cfg.sigma_level_min, cfg.sigma_level_max) / 255.0;
  if (u < cfg.mode_probs[0]) return general_noise(sigma, rng);
  if (u < cfg.mode_probs[0] + cfg.mode_probs[1]) return channel_independent_noise(sigma);
  return gray_noise(sigma);
}

inline JpegSpec sample_jpeg_spec(int quality_min, int quality_max, Rng& rng) {
  return {rng.uniform_int(quality_min, quality_max)};
}

struct NoiseDraw {
  GaussianNoiseSpec gaussian;
  std::optional<JpegSpec> inner_jpeg;
};

// The Gaussian spec is always produced; the inner JPEG only with
// probability cfg.inner_jpeg_prob.
inline NoiseDraw sample_noise_specs(const NoiseConfig& cfg, Rng& rng) {
  NoiseDraw d;
  d.gaussian = sample_gaussian_noise_spec(cfg, rng);
  const JpegSpec q = sample_jpeg_spec(cfg.quality_min, cfg.quality_max, rng);
  if (rng.bernoulli(cfg.inner_jpeg_prob)) d.inner_jpeg = q;
  return d;
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_DEGRADATIONS_HPP_
