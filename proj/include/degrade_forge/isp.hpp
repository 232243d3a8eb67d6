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

#ifndef DEGRADE_FORGE_ISP_HPP_
#define DEGRADE_FORGE_ISP_HPP_

// Processed camera sensor noise. An sRGB image is taken back to a synthetic
// Bayer raw (inverse gamma, inverse tone curve, XYZ/camera colour transforms,
// inverse gains, mosaic), raw noise with variance shot * x + read is added,
// and the forward pipeline (Malvar-He-Cutler demosaic, gains, forward matrix,
// XYZ(D50) -> linear sRGB, tone curve, sRGB gamma) renders it again.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/mat3.hpp"
#include "degrade_forge/rng.hpp"
#include <nlohmann/json.hpp>

namespace degrade_forge {

enum class BayerPattern { kRGGB, kBGGR, kGRBG, kGBRG };

inline const char* to_string(BayerPattern p) {
  switch (p) {
    case BayerPattern::kRGGB: return "RGGB";
    case BayerPattern::kBGGR: return "BGGR";
    case BayerPattern::kGRBG: return "GRBG";
    case BayerPattern::kGBRG: return "GBRG";
  }
  return "?";
}

inline BayerPattern bayer_pattern_from_string(const std::string& s) {
  if (s == "RGGB") return BayerPattern::kRGGB;
  if (s == "BGGR") return BayerPattern::kBGGR;
  if (s == "GRBG") return BayerPattern::kGRBG;
  if (s == "GBRG") return BayerPattern::kGBRG;
  throw InvalidArgument("unknown Bayer pattern '" + s + "'");
}

// Colour index (0 = R, 1 = G, 2 = B) sampled at (r, c).
inline int bayer_color(BayerPattern p, int r, int c) {
  const int pos = ((r & 1) << 1) | (c & 1);
  static constexpr int kTable[4][4] = {
      {0, 1, 1, 2},  // RGGB
      {2, 1, 1, 0},  // BGGR
      {1, 0, 2, 1},  // GRBG
      {1, 2, 0, 1},  // GBRG
  };
  return kTable[static_cast<int>(p)][pos];
}

struct RawBayer {
  int height = 0;
  int width = 0;
  BayerPattern pattern = BayerPattern::kRGGB;
  std::vector<double> values;

  RawBayer() = default;
  RawBayer(int h, int w, BayerPattern p, double fill = 0.0) : height(h), width(w), pattern(p) {
    if (h < 2 || w < 2 || h % 2 || w % 2) throw InvalidArgument("RawBayer: dimensions must be even");
    values.assign(static_cast<std::size_t>(h) * w, fill);
  }
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * width + c]; }

  friend bool operator==(const RawBayer&, const RawBayer&) = default;
};

// ---------------------------------------------------------------------------
// Tone curves

// Strictly increasing curve on [0, 1] stored as uniformly spaced samples and
// evaluated by linear interpolation. The inverse interpolates the same table
// with the axes swapped, so it is the exact inverse of the piecewise-linear
// forward map.
class ToneCurve {
 public:
  static constexpr int kSamples = 1025;

  ToneCurve() : ToneCurve("linear", linear_samples()) {}

  ToneCurve(std::string name, std::vector<double> samples)
      : name_(std::move(name)), samples_(std::move(samples)) {
    if (samples_.size() != static_cast<std::size_t>(kSamples)) {
      throw ConfigError("tone curve '" + name_ + "': expected " + std::to_string(kSamples) +
                        " samples, got " + std::to_string(samples_.size()));
    }
    if (samples_.front() != 0.0 || samples_.back() != 1.0) {
      throw ConfigError("tone curve '" + name_ + "': must map 0 to 0 and 1 to 1");
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (!(samples_[i] > samples_[i - 1])) {
        throw ConfigError("tone curve '" + name_ + "': not strictly increasing");
      }
    }
  }

  template <typename F>
  static ToneCurve tabulate(std::string name, F&& f) {
    std::vector<double> s(kSamples);
    for (int i = 0; i < kSamples; ++i) s[i] = f(static_cast<double>(i) / (kSamples - 1));
    s.front() = 0.0;
    s.back() = 1.0;
    return ToneCurve(std::move(name), std::move(s));
  }

  const std::string& name() const { return name_; }
  const std::vector<double>& samples() const { return samples_; }

  double forward(double x) const {
    x = std::clamp(x, 0.0, 1.0) * (kSamples - 1);
    const int k = std::min(static_cast<int>(x), kSamples - 2);
    const double t = x - k;
    return samples_[k] + t * (samples_[k + 1] - samples_[k]);
  }

  double inverse(double y) const {
    y = std::clamp(y, 0.0, 1.0);
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), y);
    const int k = std::clamp(static_cast<int>(it - samples_.begin()) - 1, 0, kSamples - 2);
    const double t = (y - samples_[k]) / (samples_[k + 1] - samples_[k]);
    return (k + t) / (kSamples - 1);
  }

 private:
  static std::vector<double> linear_samples() {
    std::vector<double> s(kSamples);
    for (int i = 0; i < kSamples; ++i) s[i] = static_cast<double>(i) / (kSamples - 1);
    return s;
  }

  std::string name_;
  std::vector<double> samples_;
};

// ---------------------------------------------------------------------------
// Calibration pool

struct CalibrationEntry {
  std::string name;
  Mat3 forward_matrix1{};
  Mat3 forward_matrix2{};
  ToneCurve tone_curve;
};

inline constexpr Mat3 kXyzD50ToLinearSrgb = {3.1338561,  -1.6168667, -0.4906146, -0.9787684, 1.9161415,
                                             0.0334540,  0.0719453,  -0.2289914, 1.4052427};

inline const Mat3& linear_srgb_to_xyz_d50() {
  static const Mat3 m = inverse(kXyzD50ToLinearSrgb);
  return m;
}

inline constexpr int kCalibrationPoolVersion = 1;
inline constexpr const char* kCalibrationPoolSchema = "degrade-forge/calibration-pool";

// Forward matrices and tone curves. Sampling picks the matrix pair and the
// tone curve independently, so curves and matrices need not share an entry.
class CalibrationPool {
 public:
  CalibrationPool() = default;
  explicit CalibrationPool(std::vector<CalibrationEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("calibration pool is empty");
  }

  const std::vector<CalibrationEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const ToneCurve& tone_curve(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
      throw InvalidArgument("tone curve id " + std::to_string(id) + " not in pool");
    }
    return entries_[static_cast<std::size_t>(id)].tone_curve;
  }

  // Three synthetic cameras: forward matrices are row-normalized
  // perturbations of the sRGB -> XYZ(D50) matrix, paired with the smoothstep
  // curve and two power curves.
  static const CalibrationPool& builtin() {
    static const CalibrationPool pool = make_builtin();
    return pool;
  }

  static CalibrationPool from_json(const nlohmann::json& doc) {
    try {
      if (doc.at("schema").get<std::string>() != kCalibrationPoolSchema) {
        throw ConfigError("calibration pool: unexpected schema '" + doc.at("schema").get<std::string>() + "'");
      }
      const int version = doc.at("version").get<int>();
      if (version != kCalibrationPoolVersion) {
        throw ConfigError("calibration pool: unsupported version " + std::to_string(version) +
                          " (supported: " + std::to_string(kCalibrationPoolVersion) + ")");
      }
      std::vector<CalibrationEntry> entries;
      for (const auto& e : doc.at("entries")) {
        CalibrationEntry entry;
        entry.name = e.at("name").get<std::string>();
        entry.forward_matrix1 = e.at("forward_matrix1").get<Mat3>();
        entry.forward_matrix2 = e.at("forward_matrix2").get<Mat3>();
        entry.tone_curve = ToneCurve(entry.name, e.at("tone_curve").get<std::vector<double>>());
        entries.push_back(std::move(entry));
      }
      return CalibrationPool(std::move(entries));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("calibration pool: ") + e.what());
    }
  }

  static CalibrationPool load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calibration pool " + path.string());
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("calibration pool " + path.string() + ": " + e.what());
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json doc;
    doc["schema"] = kCalibrationPoolSchema;
    doc["version"] = kCalibrationPoolVersion;
    doc["entries"] = nlohmann::json::array();
    for (const auto& e : entries_) {
      doc["entries"].push_back({{"name", e.name},
                                {"forward_matrix1", e.forward_matrix1},
                                {"forward_matrix2", e.forward_matrix2},
                                {"tone_curve", e.tone_curve.samples()}});
    }
    return doc;
  }

 private:
  static Mat3 perturbed(const Mat3& perturbation) {
    const Mat3& base = linear_srgb_to_xyz_d50();
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
      double target = 0.0, sum = 0.0;
      for (int j = 0; j < 3; ++j) {
        target += base[i * 3 + j];
        m[i * 3 + j] = base[i * 3 + j] * (1.0 + perturbation[i * 3 + j]);
        sum += m[i * 3 + j];
      }
      for (int j = 0; j < 3; ++j) m[i * 3 + j] *= target / sum;
    }
    return m;
  }

  static CalibrationPool make_builtin() {
    std::vector<CalibrationEntry> e(3);
    e[0] = {"synthetic-a",
            perturbed({0.04, -0.03, 0.02, -0.02, 0.03, -0.05, 0.01, -0.04, 0.02}),
            perturbed({-0.03, 0.02, 0.05, 0.02, -0.02, 0.04, -0.05, 0.03, -0.01}),
            ToneCurve::tabulate("smoothstep", [](double x) { return x * x * (3.0 - 2.0 * x); })};
    e[1] = {"synthetic-b",
            perturbed({-0.05, 0.04, -0.02, 0.03, -0.01, 0.02, 0.04, 0.02, -0.03}),
            perturbed({0.02, -0.05, 0.03, -0.04, 0.02, -0.02, 0.03, -0.01, 0.04}),
            ToneCurve::tabulate("power-1.25", [](double x) { return std::pow(x, 1.25); })};
    e[2] = {"synthetic-c",
            perturbed({0.01, 0.05, -0.04, 0.05, -0.03, 0.01, -0.02, 0.04, 0.03}),
            perturbed({-0.02, -0.01, 0.04, -0.03, 0.05, -0.04, 0.02, -0.05, 0.01}),
            ToneCurve::tabulate("power-1.5", [](double x) { return std::pow(x, 1.5); })};
    return CalibrationPool(std::move(e));
  }

  std::vector<CalibrationEntry> entries_;
};

// ---------------------------------------------------------------------------
// Camera parameters

struct IspConfig {
  double exposure_log2_min = -0.1;
  double exposure_log2_max = 0.3;
  double wb_gain_min = 1.2;
  double wb_gain_max = 2.4;
  double log_shot_min = std::log(1e-4);
  double log_shot_max = std::log(1.2e-2);
  double read_slope = 2.18;
  double read_intercept = 1.20;
  double read_stddev = 0.26;
  bool sample_pattern = false;
  BayerPattern pattern = BayerPattern::kRGGB;

  friend bool operator==(const IspConfig&, const IspConfig&) = default;
};

struct CameraParams {
  double exposure_gain = 1.0;
  double red_gain = 1.0;
  double blue_gain = 1.0;
  Mat3 ccm = kIdentity3;  // white-balanced camera RGB -> XYZ(D50)
  int ccm_entry = 0;
  double ccm_weight = 1.0;
  int tone_curve_id = 0;
  double shot_noise = 0.0;
  double read_noise = 0.0;

  friend bool operator==(const CameraParams&, const CameraParams&) = default;
};

// w * FM1 + (1 - w) * FM2
inline Mat3 blend_forward_matrices(const CalibrationEntry& entry, double w) {
  Mat3 m{};
  for (int i = 0; i < 9; ++i) m[i] = w * entry.forward_matrix1[i] + (1.0 - w) * entry.forward_matrix2[i];
  return m;
}

inline CameraParams sample_camera_params(const CalibrationPool& pool, const IspConfig& cfg, Rng& rng) {
  if (pool.empty()) throw ConfigError("sample_camera_params: calibration pool is empty");
  CameraParams cam;
  cam.exposure_gain = std::exp2(rng.uniform(cfg.exposure_log2_min, cfg.exposure_log2_max));
  cam.red_gain = rng.uniform(cfg.wb_gain_min, cfg.wb_gain_max);
  cam.blue_gain = rng.uniform(cfg.wb_gain_min, cfg.wb_gain_max);
  cam.ccm_entry = static_cast<int>(rng.below(pool.size()));
  cam.ccm_weight = rng.uniform();
  cam.ccm = blend_forward_matrices(pool.entries()[static_cast<std::size_t>(cam.ccm_entry)], cam.ccm_weight);
  cam.tone_curve_id = static_cast<int>(rng.below(pool.size()));
  const double log_shot = rng.uniform(cfg.log_shot_min, cfg.log_shot_max);
  const double log_read = rng.normal(cfg.read_slope * log_shot + cfg.read_intercept, cfg.read_stddev);
  cam.shot_noise = std::exp(log_shot);
  cam.read_noise = std::exp(log_read);
  try {
    (void)inverse(cam.ccm);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("calibration entry " + std::to_string(cam.ccm_entry) + " yields a singular ccm");
  }
  return cam;
}

inline BayerPattern sample_bayer_pattern(const IspConfig& cfg, Rng& rng) {
  if (!cfg.sample_pattern) return cfg.pattern;
  return static_cast<BayerPattern>(rng.below(4));
}

// ---------------------------------------------------------------------------
// Transfer functions

inline double srgb_encode(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x <= 0.0031308 ? 12.92 * x : 1.055 * std::pow(x, 1.0 / 2.4) - 0.055;
}

inline double srgb_decode(double y) {
  y = std::clamp(y, 0.0, 1.0);
  return y <= 0.04045 ? y / 12.92 : std::pow((y + 0.055) / 1.055, 2.4);
}

// ---------------------------------------------------------------------------
// Demosaicing

namespace isp_detail {

// Malvar-He-Cutler 5x5 stencils, in eighths, indexed [dy + 2][dx + 2].
inline constexpr double kGreenAtRedBlue[5][5] = {
    {0, 0, -1, 0, 0}, {0, 0, 2, 0, 0}, {-1, 2, 4, 2, -1}, {0, 0, 2, 0, 0}, {0, 0, -1, 0, 0}};
// Colour of the horizontal neighbours at a green site.
inline constexpr double kRowColorAtGreen[5][5] = {{0, 0, 0.5, 0, 0},
                                                  {0, -1, 0, -1, 0},
                                                  {-1, 4, 5, 4, -1},
                                                  {0, -1, 0, -1, 0},
                                                  {0, 0, 0.5, 0, 0}};
// Colour of the vertical neighbours at a green site.
inline constexpr double kColumnColorAtGreen[5][5] = {{0, 0, -1, 0, 0},
                                                     {0, -1, 4, -1, 0},
                                                     {0.5, 0, 5, 0, 0.5},
                                                     {0, -1, 4, -1, 0},
                                                     {0, 0, -1, 0, 0}};
// Red at blue sites and blue at red sites.
inline constexpr double kOppositeColor[5][5] = {{0, 0, -1.5, 0, 0},
                                                {0, 2, 0, 2, 0},
                                                {-1.5, 0, 6, 0, -1.5},
                                                {0, 2, 0, 2, 0},
                                                {0, 0, -1.5, 0, 0}};

}  // namespace isp_detail

// Gradient-corrected linear interpolation; borders use reflect-101 padding,
// which preserves the mosaic phase. Output is not clamped.
inline ImageF demosaic_malvar(const RawBayer& raw) {
  using namespace isp_detail;
  const int h = raw.height, w = raw.width;
  ImageF out(h, w, 3);
  auto stencil = [&](const double (&k)[5][5], int r, int c) {
    double s = 0.0;
    for (int dy = -2; dy <= 2; ++dy) {
      const int rr = detail::reflect101(r + dy, h);
      for (int dx = -2; dx <= 2; ++dx) {
        const double wgt = k[dy + 2][dx + 2];
        if (wgt != 0.0) s += wgt * raw.at(rr, detail::reflect101(c + dx, w));
      }
    }
    return s / 8.0;
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int site = bayer_color(raw.pattern, r, c);
      out(r, c, site) = raw.at(r, c);
      if (site == 1) {
        const int row_color = bayer_color(raw.pattern, r, c + 1);
        out(r, c, row_color) = stencil(kRowColorAtGreen, r, c);
        out(r, c, 2 - row_color) = stencil(kColumnColorAtGreen, r, c);
      } else {
        out(r, c, 1) = stencil(kGreenAtRedBlue, r, c);
        out(r, c, 2 - site) = stencil(kOppositeColor, r, c);
      }
    }
  }
  return out;
}

inline RawBayer mosaic(const ImageF& rgb, BayerPattern pattern) {
  RawBayer raw(rgb.height(), rgb.width(), pattern);
  for (int r = 0; r < raw.height; ++r)
    for (int c = 0; c < raw.width; ++c)
      raw.at(r, c) = std::clamp(rgb(r, c, bayer_color(pattern, r, c)), 0.0, 1.0);
  return raw;
}

// ---------------------------------------------------------------------------
// Pipelines

// Demosaic -> exposure and white-balance gains -> forward matrix to XYZ(D50)
// -> linear sRGB -> tone curve -> sRGB gamma. Output is clamped.
inline ImageF forward_isp(const RawBayer& raw, const CameraParams& cam, const CalibrationPool& pool) {
  const ToneCurve& tone = pool.tone_curve(cam.tone_curve_id);
  ImageF img = demosaic_malvar(raw);
  const Vec3 gain = {cam.exposure_gain * cam.red_gain, cam.exposure_gain, cam.exposure_gain * cam.blue_gain};
  const Mat3 to_rgb = mul(kXyzD50ToLinearSrgb, cam.ccm);
  auto s = img.samples();
  for (std::size_t p = 0; p < s.size(); p += 3) {
    const Vec3 lin = mul(to_rgb, Vec3{s[p] * gain[0], s[p + 1] * gain[1], s[p + 2] * gain[2]});
    for (int q = 0; q < 3; ++q) s[p + q] = srgb_encode(tone.forward(std::clamp(lin[q], 0.0, 1.0)));
  }
  return img;
}

inline ImageF reverse_isp_rgb(const ImageF& img, const CameraParams& cam, const CalibrationPool& pool) {
  if (img.channels() != 3) throw InvalidArgument("reverse_isp: expected 3 channels");
  const ToneCurve& tone = pool.tone_curve(cam.tone_curve_id);
  const Mat3 to_cam = mul(inverse(cam.ccm), linear_srgb_to_xyz_d50());
  const Vec3 inv_gain = {1.0 / (cam.exposure_gain * cam.red_gain), 1.0 / cam.exposure_gain,
                         1.0 / (cam.exposure_gain * cam.blue_gain)};
  ImageF out(img.height(), img.width(), 3);
  auto src = img.samples();
  auto dst = out.samples();
  for (std::size_t p = 0; p < src.size(); p += 3) {
    Vec3 lin;
    for (int q = 0; q < 3; ++q) lin[q] = tone.inverse(srgb_decode(src[p + q]));
    const Vec3 camrgb = mul(to_cam, lin);
    for (int q = 0; q < 3; ++q) dst[p + q] = camrgb[q] * inv_gain[q];
  }
  return out;
}

// Inverse gamma -> inverse tone curve -> XYZ(D50) -> camera RGB -> divide
// by gains -> Bayer sampling, clamped to [0, 1].
inline RawBayer reverse_isp(const ImageF& img, const CameraParams& cam, BayerPattern pattern,
                            const CalibrationPool& pool) {
  if (img.height() % 2 || img.width() % 2) {
    throw InvalidArgument("reverse_isp: dimensions must be even, got " + std::to_string(img.height()) +
                          "x" + std::to_string(img.width()));
  }
  return mosaic(reverse_isp_rgb(img, cam, pool), pattern);
}

// Per site: x + N(0, shot * x + read), clamped.
inline RawBayer add_raw_noise(const RawBayer& raw, double shot, double read, Rng& rng) {
  if (!(shot >= 0.0) || !(read >= 0.0)) throw InvalidArgument("add_raw_noise: negative noise parameter");
  RawBayer out = raw;
  for (double& v : out.values) {
    const double var = std::max(0.0, shot * v + read);
    v = std::clamp(v + std::sqrt(var) * rng.normal(), 0.0, 1.0);
  }
  return out;
}

// One row/column of reflect-101 padding on the bottom/right to reach even
// sides.
inline ImageF pad_to_even(const ImageF& img) {
  const int h = img.height() + (img.height() % 2), w = img.width() + (img.width() % 2);
  if (h == img.height() && w == img.width()) return img;
  ImageF out(h, w, img.channels());
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int q = 0; q < img.channels(); ++q)
        out(r, c, q) = img(detail::reflect101(r, img.height()), detail::reflect101(c, img.width()), q);
  return out;
}

inline ImageF processed_sensor_noise(const ImageF& img, const CameraParams& cam, BayerPattern pattern,
                                     const CalibrationPool& pool, Rng& rng) {
  if (img.channels() != 3) throw InvalidArgument("processed_sensor_noise: expected 3 channels");
  const ImageF padded = pad_to_even(img);
  const RawBayer raw = add_raw_noise(reverse_isp(padded, cam, pattern, pool), cam.shot_noise, cam.read_noise, rng);
  ImageF out = forward_isp(raw, cam, pool);
  if (out.height() != img.height() || out.width() != img.width()) out = crop(out, 0, 0, img.height(), img.width());
  return out;
}

inline ImageF processed_sensor_noise(const ImageF& img, const CalibrationPool& pool, const IspConfig& cfg,
                                     Rng& rng) {
  const CameraParams cam = sample_camera_params(pool, cfg, rng);
  const BayerPattern pattern = sample_bayer_pattern(cfg, rng);
  return processed_sensor_noise(img, cam, pattern, pool, rng);
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_ISP_HPP_
