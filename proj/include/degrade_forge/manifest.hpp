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

#ifndef DEGRADE_FORGE_MANIFEST_HPP_
#define DEGRADE_FORGE_MANIFEST_HPP_

// Manifest: the provenance record written next to every LR image. It holds
// the full configuration and the fully materialized plan, so replaying it
// against the same HR reproduces the LR bit for bit.

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "degrade_forge/config.hpp"
#include "degrade_forge/errors.hpp"
#include "degrade_forge/pipeline.hpp"
#include <nlohmann/json.hpp>

namespace degrade_forge {

inline constexpr const char* kManifestSchema = "degrade-forge/manifest";
inline constexpr int kManifestVersion = 1;

struct InputIdentity {
  std::string path;
  std::uint64_t content_hash = 0;

  friend bool operator==(const InputIdentity&, const InputIdentity&) = default;
};

struct Manifest {
  std::string pipeline_version = kPipelineVersion;
  std::string rng_algorithm = std::string(Rng::kAlgorithm);
  std::uint64_t seed = 0;
  InputIdentity input;
  std::uint64_t config_hash = 0;
  DegradationConfig config;
  DegradationPlan plan;
  std::pair<int, int> hr_size{0, 0};
  std::pair<int, int> lr_size{0, 0};

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ConfigError("manifest: malformed hash '" + s + "'");
  }
  return std::stoull(s, nullptr, 16);
}

// ---------------------------------------------------------------------------
// Plan <-> JSON

inline nlohmann::json params_to_json(const OpParams& params) {
  return std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BlurSpec>) {
          if (p.kind == BlurKind::kIso) return {{"kind", "iso"}, {"size", p.size}, {"sigma", p.sigma}};
          return {{"kind", "aniso"},
                  {"size", p.size},
                  {"sigma_major", p.sigma_major},
                  {"sigma_minor", p.sigma_minor},
                  {"theta", p.theta}};
        } else if constexpr (std::is_same_v<T, DownSpec>) {
          nlohmann::json j = {{"method", to_string(p.method)}, {"scale", p.scale}};
          if (p.method == DownMethod::kNearest) j["pre_blur_sigma"] = p.pre_blur_sigma;
          if (p.method == DownMethod::kDownUp) {
            j["a"] = p.a;
            j["stage1"] = to_string(p.stage1);
            j["stage2"] = to_string(p.stage2);
          }
          return j;
        } else if constexpr (std::is_same_v<T, GaussianNoiseSpec>) {
          return {{"mode", to_string(p.mode)}, {"sigma", p.sigma}, {"covariance", p.covariance}};
        } else if constexpr (std::is_same_v<T, JpegSpec>) {
          return {{"quality", p.quality}};
        } else {
          const CameraParams& c = p.camera;
          return {{"pattern", to_string(p.pattern)},
                  {"exposure_gain", c.exposure_gain},
                  {"red_gain", c.red_gain},
                  {"blue_gain", c.blue_gain},
                  {"ccm", c.ccm},
                  {"ccm_entry", c.ccm_entry},
                  {"ccm_weight", c.ccm_weight},
                  {"tone_curve_id", c.tone_curve_id},
                  {"shot_noise", c.shot_noise},
                  {"read_noise", c.read_noise}};
        }
      },
      params);
}

inline OpParams params_from_json(OpKind kind, const nlohmann::json& j) {
  switch (kind) {
    case OpKind::kIsoBlur:
    case OpKind::kAnisoBlur: {
      BlurSpec b;
      b.kind = j.at("kind").get<std::string>() == "iso" ? BlurKind::kIso : BlurKind::kAniso;
      b.size = j.at("size").get<int>();
      if (b.kind == BlurKind::kIso) {
        b.sigma = j.at("sigma").get<double>();
      } else {
        b.sigma_major = j.at("sigma_major").get<double>();
        b.sigma_minor = j.at("sigma_minor").get<double>();
        b.theta = j.at("theta").get<double>();
      }
      return b;
    }
    case OpKind::kDown:
    case OpKind::kDownStage1:
    case OpKind::kDownStage2: {
      DownSpec d;
      d.method = down_method_from_string(j.at("method").get<std::string>());
      d.scale = j.at("scale").get<int>();
      if (d.method == DownMethod::kNearest) d.pre_blur_sigma = j.at("pre_blur_sigma").get<double>();
      if (d.method == DownMethod::kDownUp) {
        d.a = j.at("a").get<double>();
        d.stage1 = interp_from_string(j.at("stage1").get<std::string>());
        d.stage2 = interp_from_string(j.at("stage2").get<std::string>());
      }
      return d;
    }
    case OpKind::kGaussianNoise:
      return GaussianNoiseSpec{noise_mode_from_string(j.at("mode").get<std::string>()), j.at("sigma").get<double>(),
                               j.at("covariance").get<Mat3>()};
    case OpKind::kInnerJpeg:
      return JpegSpec{j.at("quality").get<int>()};
    case OpKind::kSensorNoise: {
      SensorNoiseSpec s;
      s.pattern = bayer_pattern_from_string(j.at("pattern").get<std::string>());
      CameraParams& c = s.camera;
      c.exposure_gain = j.at("exposure_gain").get<double>();
      c.red_gain = j.at("red_gain").get<double>();
      c.blue_gain = j.at("blue_gain").get<double>();
      c.ccm = j.at("ccm").get<Mat3>();
      c.ccm_entry = j.at("ccm_entry").get<int>();
      c.ccm_weight = j.at("ccm_weight").get<double>();
      c.tone_curve_id = j.at("tone_curve_id").get<int>();
      c.shot_noise = j.at("shot_noise").get<double>();
      c.read_noise = j.at("read_noise").get<double>();
      return s;
    }
  }
  throw InvalidArgument("unknown plan op");
}

inline nlohmann::json to_json(const DegradationPlan& plan) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : plan.ops) {
    nlohmann::json j = {{"op", to_string(op.kind)}, {"applied", op.applied}, {"params", params_to_json(op.params)}};
    if (op.kind == OpKind::kGaussianNoise || op.kind == OpKind::kSensorNoise) j["noise_seed"] = op.noise_seed;
    ops.push_back(std::move(j));
  }
  return {{"scale", plan.scale},
          {"pre_scale", plan.pre_scale ? nlohmann::json(to_string(*plan.pre_scale)) : nlohmann::json(nullptr)},
          {"ops", std::move(ops)},
          {"final_jpeg", {{"quality", plan.final_jpeg.quality}, {"bypass", plan.final_jpeg_bypass}}},
          {"seed", plan.seed}};
}

inline DegradationPlan plan_from_json(const nlohmann::json& j) {
  DegradationPlan plan;
  plan.scale = j.at("scale").get<int>();
  if (const auto& p = j.at("pre_scale"); !p.is_null()) plan.pre_scale = interp_from_string(p.get<std::string>());
  for (const auto& o : j.at("ops")) {
    PlanOp op;
    op.kind = op_kind_from_string(o.at("op").get<std::string>());
    op.applied = o.at("applied").get<bool>();
    op.params = params_from_json(op.kind, o.at("params"));
    if (auto s = o.find("noise_seed"); s != o.end()) op.noise_seed = s->get<std::uint64_t>();
    plan.ops.push_back(std::move(op));
  }
  plan.final_jpeg.quality = j.at("final_jpeg").at("quality").get<int>();
  plan.final_jpeg_bypass = j.at("final_jpeg").at("bypass").get<bool>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  return plan;
}

// ---------------------------------------------------------------------------
// Manifest <-> JSON

inline nlohmann::json to_json(const Manifest& m) {
  return {{"schema", kManifestSchema},
          {"version", kManifestVersion},
          {"pipeline_version", m.pipeline_version},
          {"rng", m.rng_algorithm},
          {"seed", m.seed},
          {"input", {{"path", m.input.path}, {"content_hash", hex64(m.input.content_hash)}}},
          {"config_hash", hex64(m.config_hash)},
          {"config", to_json(m.config)},
          {"plan", to_json(m.plan)},
          {"hr_size", {m.hr_size.first, m.hr_size.second}},
          {"lr_size", {m.lr_size.first, m.lr_size.second}}};
}

// Pretty-printed with sorted keys; the byte form written to disk.
inline std::string serialize_manifest(const Manifest& m) { return to_json(m).dump(2) + "\n"; }

inline Manifest parse_manifest(std::string_view doc) {
  try {
    const auto j = nlohmann::json::parse(doc);
    if (j.at("schema").get<std::string>() != kManifestSchema) {
      throw ConfigError("manifest: unexpected schema '" + j.at("schema").get<std::string>() + "'");
    }
    const int version = j.at("version").get<int>();
    if (version != kManifestVersion) {
      throw ConfigError("manifest: schema version " + std::to_string(version) + " is not supported (this build reads version " +
                        std::to_string(kManifestVersion) + ")");
    }
    Manifest m;
    m.pipeline_version = j.at("pipeline_version").get<std::string>();
    m.rng_algorithm = j.at("rng").get<std::string>();
    if (m.rng_algorithm != Rng::kAlgorithm) {
      throw ConfigError("manifest: generated with rng '" + m.rng_algorithm + "', this build uses '" +
                        std::string(Rng::kAlgorithm) + "'");
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    m.input.path = j.at("input").at("path").get<std::string>();
    m.input.content_hash = parse_hex64(j.at("input").at("content_hash").get<std::string>());
    m.config_hash = parse_hex64(j.at("config_hash").get<std::string>());
    m.config = config_from_json(j.at("config"));
    m.plan = plan_from_json(j.at("plan"));
    const auto& hr = j.at("hr_size");
    const auto& lr = j.at("lr_size");
    m.hr_size = {hr.at(0).get<int>(), hr.at(1).get<int>()};
    m.lr_size = {lr.at(0).get<int>(), lr.at(1).get<int>()};
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Entry points

struct DegradeResult {
  ExecutionResult output;
  Manifest manifest;
};

inline Manifest make_manifest(const ImageF& hr, const DegradationConfig& cfg, const DegradationPlan& plan,
                              const ExecutionResult& out, std::string input_path = {}) {
  Manifest m;
  m.seed = plan.seed;
  m.input = {std::move(input_path), content_hash(hr)};
  m.config = cfg;
  m.config_hash = config_hash(cfg);
  m.plan = plan;
  m.hr_size = {hr.height(), hr.width()};
  m.lr_size = {out.lr.height(), out.lr.width()};
  return m;
}

inline DegradationPlan plan_for(const ImageF& hr, const DegradationConfig& cfg, std::uint64_t seed,
                                const CalibrationPool& pool) {
  Rng rng(derive_seed(seed, content_hash(hr)));
  DegradationPlan plan = sample_plan(cfg, rng, pool);
  plan.seed = seed;
  return plan;
}

// Samples a plan from a substream keyed by (seed, HR content) and runs it.
inline DegradeResult degrade(const ImageF& hr, const DegradationConfig& cfg, std::uint64_t seed,
                             const CalibrationPool& pool, std::string input_path = {}) {
  const DegradationPlan plan = plan_for(hr, cfg, seed, pool);
  ExecutionResult out = execute_plan(hr, plan, pool);
  Manifest m = make_manifest(hr, cfg, plan, out, std::move(input_path));
  return {std::move(out), std::move(m)};
}

inline DegradeResult degrade(const ImageF& hr, const DegradationConfig& cfg, std::uint64_t seed) {
  return degrade(hr, cfg, seed, resolve_pool(cfg));
}

// Re-executes a manifest. A larger HR is center-cropped to the recorded size.
inline ExecutionResult replay(const ImageF& hr, const Manifest& m, const CalibrationPool& pool) {
  const auto [h, w] = m.hr_size;
  if (hr.height() < h || hr.width() < w) {
    throw InvalidArgument("replay: HR is " + std::to_string(hr.height()) + "x" + std::to_string(hr.width()) +
                          ", manifest expects " + std::to_string(h) + "x" + std::to_string(w));
  }
  if (hr.height() == h && hr.width() == w) return execute_plan(hr, m.plan, pool);
  return execute_plan(crop(hr, (hr.height() - h) / 2, (hr.width() - w) / 2, h, w), m.plan, pool);
}

inline ExecutionResult replay(const ImageF& hr, const Manifest& m) { return replay(hr, m, resolve_pool(m.config)); }

// Document-level surface for foreign bindings: configuration and manifest
// cross the boundary as their serialized text.
struct DocumentResult {
  ImageF lr;
  std::string manifest_doc;
};

inline DocumentResult degrade_document(const ImageF& hr, std::string_view config_doc, std::uint64_t seed) {
  if (hr.empty()) throw InvalidArgument("degrade: empty image");
  const DegradationConfig cfg = parse_config(config_doc);
  auto r = degrade(hr, cfg, seed);
  return {std::move(r.output.lr), serialize_manifest(r.manifest)};
}

inline ImageF replay_document(const ImageF& hr, std::string_view manifest_doc) {
  if (hr.empty()) throw InvalidArgument("replay: empty image");
  return replay(hr, parse_manifest(manifest_doc)).lr;
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_MANIFEST_HPP_
