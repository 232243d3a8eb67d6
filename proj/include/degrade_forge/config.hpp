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

#ifndef DEGRADE_FORGE_CONFIG_HPP_
#define DEGRADE_FORGE_CONFIG_HPP_

// Degradation configuration and its JSON document form. Omitted keys take
// the defaults below; unknown keys are rejected.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "degrade_forge/degradations.hpp"
#include "degrade_forge/errors.hpp"
#include "degrade_forge/isp.hpp"
#include "degrade_forge/kernels.hpp"
#include <nlohmann/json.hpp>

namespace degrade_forge {

struct DownsampleConfig {
  std::vector<DownMethod> methods = {DownMethod::kNearest, DownMethod::kBilinear, DownMethod::kBicubic,
                                     DownMethod::kDownUp};
  double nearest_sigma_min = 0.1;
  double nearest_sigma_max_factor = 0.6;  // upper bound is factor * s
  double down_up_a_min = 0.5;             // upper bound is s
  double split_down_up_prob = 0.5;

  friend bool operator==(const DownsampleConfig&, const DownsampleConfig&) = default;
};

struct DegradationConfig {
  int scale = 2;
  BlurRanges blur_scale2 = BlurRanges::for_scale(2);
  BlurRanges blur_scale4 = BlurRanges::for_scale(4);
  DownsampleConfig downsample;
  NoiseConfig noise;
  double sensor_noise_prob = 0.25;
  IspConfig isp;
  std::string calibration_pool;  // empty: built-in pool
  double pre_scale_prob = 0.25;  // scale 4 only
  int final_quality_min = 30;
  int final_quality_max = 95;

  bool enable_iso_blur = true;
  bool enable_aniso_blur = true;
  bool enable_gaussian_noise = true;
  bool enable_inner_jpeg = true;
  bool enable_sensor_noise = true;
  bool enable_pre_scale = true;
  bool enable_final_jpeg = true;

  const BlurRanges& blur_ranges(int s) const { return s == 4 ? blur_scale4 : blur_scale2; }

  friend bool operator==(const DegradationConfig&, const DegradationConfig&) = default;
};

namespace config_detail {

inline void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

template <typename T>
void check_range(T lo, T hi, const char* name) {
  if (!(lo <= hi)) throw ConfigError(std::string(name) + ": range is empty or unordered");
}

inline void check_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

inline nlohmann::json blur_ranges_to_json(const BlurRanges& r) {
  return {{"min_size", r.min_size},
          {"max_size", r.max_size},
          {"iso_sigma_min", r.iso_sigma_min},
          {"iso_sigma_max", r.iso_sigma_max},
          {"aniso_sigma_min", r.aniso_sigma_min},
          {"aniso_sigma_max", r.aniso_sigma_max}};
}

inline void blur_ranges_from_json(const nlohmann::json& j, BlurRanges& r, const std::string& where) {
  check_keys(j, {"min_size", "max_size", "iso_sigma_min", "iso_sigma_max", "aniso_sigma_min", "aniso_sigma_max"},
             where);
  read(j, "min_size", r.min_size);
  read(j, "max_size", r.max_size);
  read(j, "iso_sigma_min", r.iso_sigma_min);
  read(j, "iso_sigma_max", r.iso_sigma_max);
  read(j, "aniso_sigma_min", r.aniso_sigma_min);
  read(j, "aniso_sigma_max", r.aniso_sigma_max);
}

inline void validate_blur_ranges(const BlurRanges& r, const char* where) {
  if (r.min_size < 1 || r.min_size % 2 == 0 || r.max_size % 2 == 0) {
    throw ConfigError(std::string(where) + ": kernel sizes must be odd and positive");
  }
  check_range(r.min_size, r.max_size, where);
  if (!(r.iso_sigma_min > 0.0) || !(r.aniso_sigma_min > 0.0)) {
    throw ConfigError(std::string(where) + ": sigmas must be positive");
  }
  check_range(r.iso_sigma_min, r.iso_sigma_max, where);
  check_range(r.aniso_sigma_min, r.aniso_sigma_max, where);
}

}  // namespace config_detail

inline void validate(const DegradationConfig& c) {
  using namespace config_detail;
  if (c.scale != 2 && c.scale != 4) throw ConfigError("scale must be 2 or 4");
  validate_blur_ranges(c.blur_scale2, "blur.scale2");
  validate_blur_ranges(c.blur_scale4, "blur.scale4");
  if (c.downsample.methods.empty()) throw ConfigError("downsample.methods is empty");
  for (DownMethod m : c.downsample.methods) {
    if (m == DownMethod::kStride) throw ConfigError("downsample.methods: 'stride' is not a sampled method");
  }
  if (!(c.downsample.nearest_sigma_min >= 0.1)) throw ConfigError("downsample.nearest_sigma_min must be >= 0.1");
  if (!(c.downsample.nearest_sigma_max_factor <= 0.6)) {
    throw ConfigError("downsample.nearest_sigma_max_factor must be <= 0.6");
  }
  check_range(c.downsample.nearest_sigma_min, c.downsample.nearest_sigma_max_factor * 2, "downsample.nearest_sigma");
  if (!(c.downsample.down_up_a_min >= 0.5)) throw ConfigError("downsample.down_up_a_min must be >= 0.5");
  check_range(c.downsample.down_up_a_min, 2.0, "downsample.down_up_a");
  check_prob(c.downsample.split_down_up_prob, "downsample.split_down_up_prob");
  double total = 0.0;
  for (double p : c.noise.mode_probs) {
    check_prob(p, "noise.mode_probs");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("noise.mode_probs must sum to 1");
  if (c.noise.sigma_level_min < 1) throw ConfigError("noise.sigma_level_min must be >= 1");
  check_range(c.noise.sigma_level_min, c.noise.sigma_level_max, "noise.sigma_level");
  check_prob(c.noise.inner_jpeg_prob, "noise.inner_jpeg_prob");
  if (c.noise.quality_min < 1 || c.noise.quality_max > 100) throw ConfigError("noise.quality outside [1, 100]");
  check_range(c.noise.quality_min, c.noise.quality_max, "noise.quality");
  check_prob(c.sensor_noise_prob, "sensor_noise.prob");
  check_range(c.isp.exposure_log2_min, c.isp.exposure_log2_max, "sensor_noise.exposure_log2");
  if (!(c.isp.wb_gain_min > 0.0)) throw ConfigError("sensor_noise.wb_gain_min must be positive");
  check_range(c.isp.wb_gain_min, c.isp.wb_gain_max, "sensor_noise.wb_gain");
  check_range(c.isp.log_shot_min, c.isp.log_shot_max, "sensor_noise.log_shot");
  if (!(c.isp.read_stddev >= 0.0)) throw ConfigError("sensor_noise.read_stddev must be >= 0");
  check_prob(c.pre_scale_prob, "pre_scale.prob");
  if (c.final_quality_min < 1 || c.final_quality_max > 100) throw ConfigError("final_jpeg.quality outside [1, 100]");
  check_range(c.final_quality_min, c.final_quality_max, "final_jpeg.quality");
}

inline nlohmann::json to_json(const DegradationConfig& c) {
  using namespace config_detail;
  nlohmann::json methods = nlohmann::json::array();
  for (DownMethod m : c.downsample.methods) methods.push_back(to_string(m));
  return {
      {"scale", c.scale},
      {"blur", {{"scale2", blur_ranges_to_json(c.blur_scale2)}, {"scale4", blur_ranges_to_json(c.blur_scale4)}}},
      {"downsample",
       {{"methods", methods},
        {"nearest_sigma_min", c.downsample.nearest_sigma_min},
        {"nearest_sigma_max_factor", c.downsample.nearest_sigma_max_factor},
        {"down_up_a_min", c.downsample.down_up_a_min},
        {"split_down_up_prob", c.downsample.split_down_up_prob}}},
      {"noise",
       {{"mode_probs", c.noise.mode_probs},
        {"sigma_level_min", c.noise.sigma_level_min},
        {"sigma_level_max", c.noise.sigma_level_max},
        {"inner_jpeg_prob", c.noise.inner_jpeg_prob},
        {"quality_min", c.noise.quality_min},
        {"quality_max", c.noise.quality_max}}},
      {"sensor_noise",
       {{"prob", c.sensor_noise_prob},
        {"calibration_pool", c.calibration_pool},
        {"exposure_log2_min", c.isp.exposure_log2_min},
        {"exposure_log2_max", c.isp.exposure_log2_max},
        {"wb_gain_min", c.isp.wb_gain_min},
        {"wb_gain_max", c.isp.wb_gain_max},
        {"log_shot_min", c.isp.log_shot_min},
        {"log_shot_max", c.isp.log_shot_max},
        {"read_slope", c.isp.read_slope},
        {"read_intercept", c.isp.read_intercept},
        {"read_stddev", c.isp.read_stddev},
        {"sample_pattern", c.isp.sample_pattern},
        {"pattern", to_string(c.isp.pattern)}}},
      {"pre_scale", {{"enabled", c.enable_pre_scale}, {"prob", c.pre_scale_prob}}},
      {"final_jpeg",
       {{"enabled", c.enable_final_jpeg},
        {"quality_min", c.final_quality_min},
        {"quality_max", c.final_quality_max}}},
      {"enable",
       {{"iso_blur", c.enable_iso_blur},
        {"aniso_blur", c.enable_aniso_blur},
        {"gaussian_noise", c.enable_gaussian_noise},
        {"inner_jpeg", c.enable_inner_jpeg},
        {"sensor_noise", c.enable_sensor_noise}}},
  };
}

inline DegradationConfig config_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  DegradationConfig c;
  try {
    check_keys(j, {"scale", "blur", "downsample", "noise", "sensor_noise", "pre_scale", "final_jpeg", "enable"},
               "config");
    read(j, "scale", c.scale);
    if (auto b = j.find("blur"); b != j.end()) {
      check_keys(*b, {"scale2", "scale4"}, "config.blur");
      if (auto s = b->find("scale2"); s != b->end()) blur_ranges_from_json(*s, c.blur_scale2, "config.blur.scale2");
      if (auto s = b->find("scale4"); s != b->end()) blur_ranges_from_json(*s, c.blur_scale4, "config.blur.scale4");
    }
    if (auto d = j.find("downsample"); d != j.end()) {
      check_keys(*d, {"methods", "nearest_sigma_min", "nearest_sigma_max_factor", "down_up_a_min", "split_down_up_prob"},
                 "config.downsample");
      if (auto m = d->find("methods"); m != d->end()) {
        c.downsample.methods.clear();
        for (const auto& name : *m) c.downsample.methods.push_back(down_method_from_string(name.get<std::string>()));
      }
      read(*d, "nearest_sigma_min", c.downsample.nearest_sigma_min);
      read(*d, "nearest_sigma_max_factor", c.downsample.nearest_sigma_max_factor);
      read(*d, "down_up_a_min", c.downsample.down_up_a_min);
      read(*d, "split_down_up_prob", c.downsample.split_down_up_prob);
    }
    if (auto n = j.find("noise"); n != j.end()) {
      check_keys(*n, {"mode_probs", "sigma_level_min", "sigma_level_max", "inner_jpeg_prob", "quality_min", "quality_max"},
                 "config.noise");
      read(*n, "mode_probs", c.noise.mode_probs);
      read(*n, "sigma_level_min", c.noise.sigma_level_min);
      read(*n, "sigma_level_max", c.noise.sigma_level_max);
      read(*n, "inner_jpeg_prob", c.noise.inner_jpeg_prob);
      read(*n, "quality_min", c.noise.quality_min);
      read(*n, "quality_max", c.noise.quality_max);
    }
    if (auto s = j.find("sensor_noise"); s != j.end()) {
      check_keys(*s, {"prob", "calibration_pool", "exposure_log2_min", "exposure_log2_max", "wb_gain_min",
                      "wb_gain_max", "log_shot_min", "log_shot_max", "read_slope", "read_intercept",
                      "read_stddev", "sample_pattern", "pattern"},
                 "config.sensor_noise");
      read(*s, "prob", c.sensor_noise_prob);
      read(*s, "calibration_pool", c.calibration_pool);
      read(*s, "exposure_log2_min", c.isp.exposure_log2_min);
      read(*s, "exposure_log2_max", c.isp.exposure_log2_max);
      read(*s, "wb_gain_min", c.isp.wb_gain_min);
      read(*s, "wb_gain_max", c.isp.wb_gain_max);
      read(*s, "log_shot_min", c.isp.log_shot_min);
      read(*s, "log_shot_max", c.isp.log_shot_max);
      read(*s, "read_slope", c.isp.read_slope);
      read(*s, "read_intercept", c.isp.read_intercept);
      read(*s, "read_stddev", c.isp.read_stddev);
      read(*s, "sample_pattern", c.isp.sample_pattern);
      if (auto p = s->find("pattern"); p != s->end()) c.isp.pattern = bayer_pattern_from_string(p->get<std::string>());
    }
    if (auto p = j.find("pre_scale"); p != j.end()) {
      check_keys(*p, {"enabled", "prob"}, "config.pre_scale");
      read(*p, "enabled", c.enable_pre_scale);
      read(*p, "prob", c.pre_scale_prob);
    }
    if (auto f = j.find("final_jpeg"); f != j.end()) {
      check_keys(*f, {"enabled", "quality_min", "quality_max"}, "config.final_jpeg");
      read(*f, "enabled", c.enable_final_jpeg);
      read(*f, "quality_min", c.final_quality_min);
      read(*f, "quality_max", c.final_quality_max);
    }
    if (auto e = j.find("enable"); e != j.end()) {
      check_keys(*e, {"iso_blur", "aniso_blur", "gaussian_noise", "inner_jpeg", "sensor_noise"}, "config.enable");
      read(*e, "iso_blur", c.enable_iso_blur);
      read(*e, "aniso_blur", c.enable_aniso_blur);
      read(*e, "gaussian_noise", c.enable_gaussian_noise);
      read(*e, "inner_jpeg", c.enable_inner_jpeg);
      read(*e, "sensor_noise", c.enable_sensor_noise);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

inline DegradationConfig parse_config(std::string_view doc) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline DegradationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string doc((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Stable hash over the canonical (sorted-key) document.
inline std::uint64_t config_hash(const DegradationConfig& c) { return fnv1a64(to_json(c).dump()); }

inline CalibrationPool resolve_pool(const DegradationConfig& c) {
  return c.calibration_pool.empty() ? CalibrationPool::builtin() : CalibrationPool::load(c.calibration_pool);
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_CONFIG_HPP_
