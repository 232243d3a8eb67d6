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

#ifndef DEGRADE_FORGE_PIPELINE_HPP_
#define DEGRADE_FORGE_PIPELINE_HPP_

// Random-shuffle degradation scheduler. A plan is sampled up front with every
// parameter (and every noise seed) materialized, so executing a plan is a pure
// function of the HR image and the plan, and a manifest replays bit-exactly.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "degrade_forge/config.hpp"
#include "degrade_forge/degradations.hpp"
#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/isp.hpp"
#include "degrade_forge/jpeg.hpp"
#include "degrade_forge/kernels.hpp"
#include "degrade_forge/rng.hpp"

namespace degrade_forge {

inline constexpr const char* kPipelineVersion = "1.0.0";

enum class OpKind {
  kIsoBlur,
  kAnisoBlur,
  kDown,        // a whole downsampler
  kDownStage1,  // first half of a split down_up
  kDownStage2,  // second half of a split down_up
  kGaussianNoise,
  kInnerJpeg,
  kSensorNoise,
};

inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::kIsoBlur: return "B_iso";
    case OpKind::kAnisoBlur: return "B_aniso";
    case OpKind::kDown: return "D";
    case OpKind::kDownStage1: return "D_down";
    case OpKind::kDownStage2: return "D_up";
    case OpKind::kGaussianNoise: return "N_G";
    case OpKind::kInnerJpeg: return "N_JPEG";
    case OpKind::kSensorNoise: return "N_S";
  }
  return "?";
}

inline OpKind op_kind_from_string(const std::string& s) {
  for (OpKind k : {OpKind::kIsoBlur, OpKind::kAnisoBlur, OpKind::kDown, OpKind::kDownStage1, OpKind::kDownStage2,
                   OpKind::kGaussianNoise, OpKind::kInnerJpeg, OpKind::kSensorNoise}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidArgument("unknown plan op '" + s + "'");
}

struct SensorNoiseSpec {
  CameraParams camera;
  BayerPattern pattern = BayerPattern::kRGGB;

  friend bool operator==(const SensorNoiseSpec&, const SensorNoiseSpec&) = default;
};

using OpParams = std::variant<BlurSpec, DownSpec, GaussianNoiseSpec, JpegSpec, SensorNoiseSpec>;

struct PlanOp {
  OpKind kind = OpKind::kDown;
  bool applied = true;
  OpParams params;
  std::uint64_t noise_seed = 0;  // N_G and N_S only

  friend bool operator==(const PlanOp&, const PlanOp&) = default;
};

struct DegradationPlan {
  int scale = 2;                    // net HR -> LR factor
  std::optional<Interp> pre_scale;  // x1/2 resize before the shuffled sequence
  std::vector<PlanOp> ops;
  JpegSpec final_jpeg;
  bool final_jpeg_bypass = false;   // lossless output, used by the classical plans
  std::uint64_t seed = 0;

  friend bool operator==(const DegradationPlan&, const DegradationPlan&) = default;
};

// The op of the given kind, or nullptr.
inline const PlanOp* find_op(const DegradationPlan& plan, OpKind kind) {
  for (const auto& op : plan.ops)
    if (op.kind == kind) return &op;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Sampling

inline DegradationPlan sample_plan(const DegradationConfig& cfg, Rng& rng, const CalibrationPool& pool) {
  validate(cfg);
  DegradationPlan plan;
  plan.scale = cfg.scale;

  int s = cfg.scale;
  if (cfg.scale == 4 && cfg.enable_pre_scale && rng.bernoulli(cfg.pre_scale_prob)) {
    plan.pre_scale = rng.bernoulli(0.5) ? Interp::kBilinear : Interp::kBicubic;
    s = 2;
  }
  const BlurRanges& ranges = cfg.blur_ranges(s);

  PlanOp iso{OpKind::kIsoBlur, cfg.enable_iso_blur, sample_blur_spec(ranges, BlurKind::kIso, rng)};
  PlanOp aniso{OpKind::kAnisoBlur, cfg.enable_aniso_blur, sample_blur_spec(ranges, BlurKind::kAniso, rng)};

  DownSpec down;
  down.scale = s;
  down.method = cfg.downsample.methods[rng.below(cfg.downsample.methods.size())];
  if (down.method == DownMethod::kNearest) {
    down.pre_blur_sigma = rng.uniform(cfg.downsample.nearest_sigma_min, cfg.downsample.nearest_sigma_max_factor * s);
  } else if (down.method == DownMethod::kDownUp) {
    down.a = rng.uniform(cfg.downsample.down_up_a_min, static_cast<double>(s));
    down.stage1 = rng.bernoulli(0.5) ? Interp::kBilinear : Interp::kBicubic;
    down.stage2 = rng.bernoulli(0.5) ? Interp::kBilinear : Interp::kBicubic;
  }

  const GaussianNoiseSpec gauss = sample_gaussian_noise_spec(cfg.noise, rng);
  const JpegSpec inner = sample_jpeg_spec(cfg.noise.quality_min, cfg.noise.quality_max, rng);
  const bool inner_on = rng.bernoulli(cfg.noise.inner_jpeg_prob);

  SensorNoiseSpec sensor;
  sensor.camera = sample_camera_params(pool, cfg.isp, rng);
  sensor.pattern = sample_bayer_pattern(cfg.isp, rng);
  const bool sensor_on = rng.bernoulli(cfg.sensor_noise_prob);

  PlanOp ng{OpKind::kGaussianNoise, cfg.enable_gaussian_noise, gauss, rng.next()};
  PlanOp nj{OpKind::kInnerJpeg, cfg.enable_inner_jpeg && inner_on, inner};
  PlanOp ns{OpKind::kSensorNoise, cfg.enable_sensor_noise && sensor_on, sensor, rng.next()};
  PlanOp d{OpKind::kDown, true, down};

  plan.ops = {iso, aniso, d, ng, nj, ns};
  rng.shuffle(plan.ops.begin(), plan.ops.end());

  if (down.method == DownMethod::kDownUp && rng.bernoulli(cfg.downsample.split_down_up_prob)) {
    const auto it = std::find_if(plan.ops.begin(), plan.ops.end(), [](const PlanOp& op) { return op.kind == OpKind::kDown; });
    const auto pos = static_cast<std::size_t>(it - plan.ops.begin());
    it->kind = OpKind::kDownStage1;
    PlanOp up{OpKind::kDownStage2, true, down};
    // Insertion point uniform over the slots after the first stage.
    const std::size_t at = pos + 1 + rng.below(plan.ops.size() - pos);
    plan.ops.insert(plan.ops.begin() + static_cast<std::ptrdiff_t>(at), up);
  }

  plan.final_jpeg = sample_jpeg_spec(cfg.final_quality_min, cfg.final_quality_max, rng);
  plan.final_jpeg_bypass = !cfg.enable_final_jpeg;
  return plan;
}

inline DegradationPlan sample_plan(const DegradationConfig& cfg, Rng& rng) {
  if (cfg.calibration_pool.empty()) return sample_plan(cfg, rng, CalibrationPool::builtin());
  return sample_plan(cfg, rng, resolve_pool(cfg));
}

enum class ClassicKind { kBicubic, kTraditional };

// The bicubic model (one antialiased bicubic downscale) and the classical
// blur -> s-stride -> AWGN model, expressed as plans. Unused slots stay in
// the plan with applied = false; the output is stored losslessly.
inline DegradationPlan classic_plan(ClassicKind kind, int scale, std::optional<BlurSpec> kernel = std::nullopt,
                                    std::optional<double> noise_sigma = std::nullopt, std::uint64_t seed = 0) {
  if (scale < 1) throw InvalidArgument("classic_plan: scale must be >= 1");
  DegradationPlan plan;
  plan.scale = scale;
  plan.seed = seed;
  plan.final_jpeg_bypass = true;
  DownSpec down;
  down.scale = scale;
  BlurSpec iso_spec, aniso_spec;
  aniso_spec.kind = BlurKind::kAniso;
  bool iso_on = false, aniso_on = false, noise_on = false;
  GaussianNoiseSpec noise = channel_independent_noise(0.0);

  if (kind == ClassicKind::kBicubic) {
    down.method = DownMethod::kBicubic;
  } else {
    down.method = DownMethod::kStride;
    if (kernel) {
      validate(*kernel);
      (kernel->kind == BlurKind::kIso ? iso_spec : aniso_spec) = *kernel;
      (kernel->kind == BlurKind::kIso ? iso_on : aniso_on) = true;
    }
    if (noise_sigma) {
      if (!(*noise_sigma >= 0.0)) throw InvalidArgument("classic_plan: noise sigma must be >= 0");
      noise = channel_independent_noise(*noise_sigma);
      noise_on = true;
    }
  }
  const bool blur_first = kind == ClassicKind::kTraditional;
  PlanOp iso{OpKind::kIsoBlur, iso_on, iso_spec};
  PlanOp aniso{OpKind::kAnisoBlur, aniso_on, aniso_spec};
  PlanOp d{OpKind::kDown, true, down};
  if (blur_first) {
    plan.ops = {iso, aniso, d};
  } else {
    plan.ops = {d, iso, aniso};
  }
  plan.ops.push_back({OpKind::kGaussianNoise, noise_on, noise, derive_seed(seed, 1)});
  plan.ops.push_back({OpKind::kInnerJpeg, false, JpegSpec{}});
  plan.ops.push_back({OpKind::kSensorNoise, false, SensorNoiseSpec{}, derive_seed(seed, 2)});
  return plan;
}

// ---------------------------------------------------------------------------
// Execution

namespace pipeline_detail {

inline void require_kernel_fits(int side, int h, int w, const char* what) {
  if (side > 2 * h - 1 || side > 2 * w - 1) {
    throw InvalidArgument(std::string(what) + ": " + std::to_string(side) + "x" + std::to_string(side) +
                          " kernel does not fit a " + std::to_string(h) + "x" + std::to_string(w) + " image");
  }
}

}  // namespace pipeline_detail

// Walks the plan's size arithmetic without touching pixels. Throws
// InvalidArgument on any violation; returns the LR size otherwise.
inline std::pair<int, int> planned_output_size(const DegradationPlan& plan, int hr_h, int hr_w) {
  using pipeline_detail::require_kernel_fits;
  if (plan.scale < 1 || hr_h % plan.scale || hr_w % plan.scale) {
    throw InvalidArgument("HR size " + std::to_string(hr_h) + "x" + std::to_string(hr_w) +
                          " is not divisible by scale " + std::to_string(plan.scale));
  }
  int h = hr_h, w = hr_w;
  if (plan.pre_scale) {
    if (h % 2 || w % 2) throw InvalidArgument("pre-scale needs even HR dimensions");
    h /= 2;
    w /= 2;
  }
  std::optional<std::pair<int, int>> pending;
  for (const auto& op : plan.ops) {
    switch (op.kind) {
      case OpKind::kIsoBlur:
      case OpKind::kAnisoBlur:
        if (op.applied) require_kernel_fits(std::get<BlurSpec>(op.params).size, h, w, to_string(op.kind));
        break;
      case OpKind::kDown: {
        const auto& d = std::get<DownSpec>(op.params);
        validate(d);
        if (d.method == DownMethod::kNearest) require_kernel_fits(kNearestKernelSize, h, w, "D_nearest");
        if (h % d.scale || w % d.scale) {
          throw InvalidArgument("downsampler input " + std::to_string(h) + "x" + std::to_string(w) +
                                " not divisible by " + std::to_string(d.scale));
        }
        std::tie(h, w) = downsampled_size(h, w, d.scale);
        break;
      }
      case OpKind::kDownStage1: {
        const auto& d = std::get<DownSpec>(op.params);
        validate(d);
        if (pending) throw InvalidArgument("plan has two D_down stages without D_up");
        pending = downsampled_size(h, w, d.scale);
        std::tie(h, w) = down_up_mid_size(h, w, d);
        break;
      }
      case OpKind::kDownStage2:
        if (!pending) throw InvalidArgument("plan has D_up without a preceding D_down");
        std::tie(h, w) = *pending;
        pending.reset();
        break;
      default:
        break;
    }
    if (h < 1 || w < 1) throw InvalidArgument("plan shrinks the image to nothing");
  }
  if (pending) throw InvalidArgument("plan has D_down without D_up");
  if (h * plan.scale != hr_h || w * plan.scale != hr_w) {
    throw InvalidArgument("plan output " + std::to_string(h) + "x" + std::to_string(w) +
                          " does not match HR / scale");
  }
  return {h, w};
}

struct ExecutionResult {
  ImageF lr;
  std::vector<std::uint8_t> lr_jpeg;  // bytes of the final encode; empty when bypassed
};

// Applies one op. `pending` carries the D_up target size between stages.
inline ImageF apply_op(const ImageF& img, const PlanOp& op, const CalibrationPool& pool,
                       std::optional<std::pair<int, int>>& pending) {
  switch (op.kind) {
    case OpKind::kIsoBlur:
    case OpKind::kAnisoBlur:
      return apply_blur(img, std::get<BlurSpec>(op.params));
    case OpKind::kDown:
      return downsample(img, std::get<DownSpec>(op.params));
    case OpKind::kDownStage1: {
      const auto& d = std::get<DownSpec>(op.params);
      pending = downsampled_size(img.height(), img.width(), d.scale);
      return down_up_stage1(img, d);
    }
    case OpKind::kDownStage2: {
      const auto [h, w] = *pending;
      pending.reset();
      return down_up_stage2(img, std::get<DownSpec>(op.params), h, w);
    }
    case OpKind::kGaussianNoise: {
      Rng rng(op.noise_seed);
      return add_gaussian_noise(img, std::get<GaussianNoiseSpec>(op.params), rng);
    }
    case OpKind::kInnerJpeg:
      return jpeg_noise(img, std::get<JpegSpec>(op.params));
    case OpKind::kSensorNoise: {
      Rng rng(op.noise_seed);
      const auto& s = std::get<SensorNoiseSpec>(op.params);
      return processed_sensor_noise(img, s.camera, s.pattern, pool, rng);
    }
  }
  throw InvalidArgument("unknown plan op");
}

inline ExecutionResult execute_plan(const ImageF& hr, const DegradationPlan& plan,
                                    const CalibrationPool& pool = CalibrationPool::builtin()) {
  if (hr.channels() != 3) throw InvalidArgument("execute_plan: HR must have 3 channels");
  if (!all_finite(hr)) throw InvalidArgument("execute_plan: HR has non-finite samples");
  planned_output_size(plan, hr.height(), hr.width());

  ImageF img = plan.pre_scale ? resize(hr, hr.height() / 2, hr.width() / 2, *plan.pre_scale, true) : hr;
  std::optional<std::pair<int, int>> pending;
  for (const auto& op : plan.ops) {
    if (!op.applied) continue;
    img = apply_op(img, op, pool, pending);
  }
  ExecutionResult result;
  if (plan.final_jpeg_bypass) {
    result.lr = std::move(img);  // unclamped; quantized when stored
  } else {
    clamp01(img);
    auto rt = jpeg_round_trip(img, plan.final_jpeg.quality);
    result.lr = std::move(rt.image);
    result.lr_jpeg = std::move(rt.bytes);
  }
  return result;
}

// Hash of the 8-bit quantized pixels and the shape.
inline std::uint64_t content_hash(const ImageF& img) {
  const auto px = quantize_u8(img);
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(img.height()), static_cast<std::uint32_t>(img.width()),
                                 static_cast<std::uint32_t>(img.channels())};
  std::uint64_t h = fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(dims), sizeof(dims)));
  return fnv1a64(px, h);
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_PIPELINE_HPP_
