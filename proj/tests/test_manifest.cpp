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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "test_util.hpp"

namespace df = degrade_forge;
namespace fs = std::filesystem;
using df::DegradationConfig;
using df::ImageF;
using df::Manifest;
using df::OpKind;
using nlohmann::json;

namespace {

bool bit_equal(const ImageF& a, const ImageF& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) return false;
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    if (a.samples()[i] != b.samples()[i]) return false;
  return true;
}

ImageF hr_crop(const std::string& name, int side) {
  const ImageF img = df_test::load(name);
  return df::crop(img, (img.height() - side) / 2, (img.width() - side) / 2, side, side);
}

// First seed whose plan has the requested op applied.
std::uint64_t seed_with(const ImageF& hr, const DegradationConfig& cfg, OpKind kind) {
  for (std::uint64_t s = 0;; ++s) {
    const auto p = df::plan_for(hr, cfg, s, df::CalibrationPool::builtin());
    const auto* op = df::find_op(p, kind);
    if (op && op->applied) return s;
  }
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("df_manifest_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Manifest, SerializationRoundTrip) {
  const ImageF hr = hr_crop("coffee", 64);
  for (int scale : {2, 4}) {
    DegradationConfig cfg;
    cfg.scale = scale;
    df::Rng rng(scale);
    for (int i = 0; i < 300; ++i) {
      Manifest m;
      m.seed = rng.next();
      m.input = {"some/dir/img_" + std::to_string(i) + ".png", rng.next()};
      m.config = cfg;
      m.config_hash = df::config_hash(cfg);
      m.plan = df::sample_plan(cfg, rng);
      m.hr_size = {64, 96};
      m.lr_size = {64 / scale, 96 / scale};
      const std::string doc = df::serialize_manifest(m);
      const Manifest back = df::parse_manifest(doc);
      ASSERT_EQ(back, m) << doc;
      ASSERT_EQ(df::serialize_manifest(back), doc);
    }
  }
}

TEST(Manifest, DocumentLayout) {
  const auto r = df::degrade(hr_crop("rocket", 64), DegradationConfig{}, 3, df::CalibrationPool::builtin(), "x.png");
  const json j = json::parse(df::serialize_manifest(r.manifest));
  EXPECT_EQ(j.at("schema"), "degrade-forge/manifest");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(j.at("rng"), df::Rng::kAlgorithm);
  EXPECT_EQ(j.at("pipeline_version"), df::kPipelineVersion);
  EXPECT_EQ(j.at("seed"), 3u);
  EXPECT_EQ(j.at("input").at("path"), "x.png");
  EXPECT_EQ(j.at("input").at("content_hash").get<std::string>().size(), 16u);
  EXPECT_EQ(j.at("hr_size"), json::array({64, 64}));
  EXPECT_EQ(j.at("lr_size"), json::array({32, 32}));
  EXPECT_EQ(j.at("plan").at("ops").size(), r.manifest.plan.ops.size());
  for (const auto& op : j.at("plan").at("ops")) {
    EXPECT_TRUE(op.contains("op"));
    EXPECT_TRUE(op.contains("applied"));
    EXPECT_TRUE(op.contains("params"));
  }
}

TEST(Manifest, ReplayIsBitExact) {
  const ImageF hr = hr_crop("astronaut", 128);
  for (int scale : {2, 4}) {
    DegradationConfig cfg;
    cfg.scale = scale;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      const auto r = df::degrade(hr, cfg, seed);
      const auto again = df::replay(hr, df::parse_manifest(df::serialize_manifest(r.manifest)));
      EXPECT_TRUE(bit_equal(again.lr, r.output.lr)) << seed;
      EXPECT_EQ(again.lr_jpeg, r.output.lr_jpeg);
    }
  }
}

TEST(Manifest, ReplayCoversEveryOpKind) {
  const ImageF hr = hr_crop("chelsea", 96);
  DegradationConfig cfg;
  cfg.downsample.methods = {df::DownMethod::kDownUp};
  for (OpKind k : {OpKind::kSensorNoise, OpKind::kInnerJpeg, OpKind::kDownStage1}) {
    const std::uint64_t seed = seed_with(hr, cfg, k);
    const auto r = df::degrade(hr, cfg, seed);
    const auto again = df::replay(hr, df::parse_manifest(df::serialize_manifest(r.manifest)));
    EXPECT_TRUE(bit_equal(again.lr, r.output.lr)) << df::to_string(k);
  }
}

TEST(Manifest, ReplayCentreCropsLargerInput) {
  const ImageF full = df_test::load("coffee");
  const ImageF hr = df::center_crop_to_multiple(full, 64);
  const auto r = df::degrade(hr, DegradationConfig{}, 9);
  EXPECT_TRUE(bit_equal(df::replay(full, r.manifest).lr, r.output.lr));
  EXPECT_THROW(df::replay(df::crop(hr, 0, 0, 32, 32), r.manifest), df::InvalidArgument);
}

TEST(Manifest, VersionMismatchNamesBothVersions) {
  const auto r = df::degrade(hr_crop("rocket", 64), DegradationConfig{}, 1);
  json j = json::parse(df::serialize_manifest(r.manifest));
  j["version"] = 7;
  try {
    df::parse_manifest(j.dump());
    FAIL() << "expected ConfigError";
  } catch (const df::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(df::kManifestVersion)), std::string::npos) << msg;
  }
}

TEST(Manifest, RngMismatchIsRejected) {
  const auto r = df::degrade(hr_crop("rocket", 64), DegradationConfig{}, 1);
  json j = json::parse(df::serialize_manifest(r.manifest));
  j["rng"] = "mt19937-64";
  try {
    df::parse_manifest(j.dump());
    FAIL() << "expected ConfigError";
  } catch (const df::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("mt19937-64"), std::string::npos) << msg;
    EXPECT_NE(msg.find(df::Rng::kAlgorithm), std::string::npos) << msg;
  }
}

TEST(Manifest, MalformedDocumentsAreRejected) {
  const auto r = df::degrade(hr_crop("rocket", 64), DegradationConfig{}, 1);
  const std::string doc = df::serialize_manifest(r.manifest);
  EXPECT_THROW(df::parse_manifest(doc.substr(0, doc.size() / 2)), df::ConfigError);
  EXPECT_THROW(df::parse_manifest(""), df::ConfigError);
  EXPECT_THROW(df::parse_manifest("[]"), df::ConfigError);

  json j = json::parse(doc);
  j["schema"] = "something-else";
  EXPECT_THROW(df::parse_manifest(j.dump()), df::ConfigError);
  j = json::parse(doc);
  j["input"]["content_hash"] = "xyz";
  EXPECT_THROW(df::parse_manifest(j.dump()), df::ConfigError);
  j = json::parse(doc);
  j["plan"]["ops"][0]["op"] = "B_unknown";
  EXPECT_THROW(df::parse_manifest(j.dump()), df::ConfigError);
  j = json::parse(doc);
  j["plan"].erase("final_jpeg");
  EXPECT_THROW(df::parse_manifest(j.dump()), df::ConfigError);
}

TEST(Manifest, TamperedSigmaChangesOutputWithoutError) {
  const ImageF hr = hr_crop("astronaut", 96);
  const DegradationConfig cfg;
  const auto r = df::degrade(hr, cfg, seed_with(hr, cfg, OpKind::kIsoBlur));
  json j = json::parse(df::serialize_manifest(r.manifest));
  bool edited = false;
  for (auto& op : j["plan"]["ops"]) {
    if (op["op"] == "B_iso") {
      op["params"]["sigma"] = op["params"]["sigma"].get<double>() + 1.5;
      edited = true;
    }
  }
  ASSERT_TRUE(edited);
  ImageF lr;
  ASSERT_NO_THROW(lr = df::replay_document(hr, j.dump()));
  EXPECT_FALSE(bit_equal(lr, r.output.lr));
}

TEST(Manifest, DocumentApi) {
  const ImageF hr = hr_crop("chelsea", 96);
  const std::string cfg_doc = R"({"scale": 4, "noise": {"inner_jpeg_prob": 1.0}})";
  const auto a = df::degrade_document(hr, cfg_doc, 17);
  const auto b = df::degrade_document(hr, cfg_doc, 17);
  EXPECT_TRUE(bit_equal(a.lr, b.lr));
  EXPECT_EQ(a.manifest_doc, b.manifest_doc);
  EXPECT_EQ(a.lr.height(), 24);
  EXPECT_TRUE(bit_equal(df::replay_document(hr, a.manifest_doc), a.lr));

  const auto direct = df::degrade(hr, df::parse_config(cfg_doc), 17);
  EXPECT_TRUE(bit_equal(direct.output.lr, a.lr));
  EXPECT_EQ(df::serialize_manifest(direct.manifest), a.manifest_doc);

  EXPECT_THROW(df::degrade_document(hr, "{\"scale\": 3}", 1), df::ConfigError);
  EXPECT_THROW(df::degrade_document(hr, "{\"scael\": 2}", 1), df::ConfigError);
  EXPECT_THROW(df::degrade_document(hr, "{", 1), df::ConfigError);
  EXPECT_THROW(df::degrade_document(ImageF(), "{}", 1), df::InvalidArgument);
  EXPECT_THROW(df::replay_document(ImageF(), a.manifest_doc), df::InvalidArgument);
  EXPECT_THROW(df::replay_document(hr, "{\"schema\":"), df::ConfigError);
}

// ---------------------------------------------------------------------------
// Config documents

TEST(Config, EmptyDocumentGivesDefaults) {
  EXPECT_EQ(df::parse_config("{}"), DegradationConfig{});
  const DegradationConfig c;
  EXPECT_EQ(c.noise.mode_probs, (std::array<double, 3>{0.2, 0.4, 0.4}));
  EXPECT_EQ(c.noise.inner_jpeg_prob, 0.75);
  EXPECT_EQ(c.sensor_noise_prob, 0.25);
  EXPECT_EQ(c.pre_scale_prob, 0.25);
  EXPECT_EQ(c.downsample.methods.size(), 4u);
}

TEST(Config, RoundTripAndPartialOverride) {
  DegradationConfig c = df::parse_config(R"({
    "scale": 4,
    "downsample": {"methods": ["bicubic", "nearest"]},
    "noise": {"sigma_level_max": 10},
    "sensor_noise": {"prob": 0.5, "pattern": "GBRG"},
    "final_jpeg": {"quality_min": 60},
    "enable": {"aniso_blur": false}
  })");
  EXPECT_EQ(c.scale, 4);
  EXPECT_EQ(c.downsample.methods, (std::vector<df::DownMethod>{df::DownMethod::kBicubic, df::DownMethod::kNearest}));
  EXPECT_EQ(c.noise.sigma_level_max, 10);
  EXPECT_EQ(c.noise.sigma_level_min, 1);
  EXPECT_EQ(c.sensor_noise_prob, 0.5);
  EXPECT_EQ(c.isp.pattern, df::BayerPattern::kGBRG);
  EXPECT_EQ(c.final_quality_min, 60);
  EXPECT_EQ(c.final_quality_max, 95);
  EXPECT_FALSE(c.enable_aniso_blur);
  EXPECT_EQ(df::config_from_json(df::to_json(c)), c);
  EXPECT_NE(df::config_hash(c), df::config_hash(DegradationConfig{}));
  EXPECT_EQ(df::config_hash(c), df::config_hash(df::config_from_json(df::to_json(c))));
}

TEST(Config, RejectsInvalidDocuments) {
  for (const char* doc : {
           R"({"scale": 3})",
           R"({"noise": {"inner_jpeg_prob": 2}})",
           R"({"noise": {"quality_min": 90, "quality_max": 40}})",
           R"({"downsample": {"methods": ["lanczos"]}})",
           R"({"downsample": {"methods": []}})",
           R"({"blur": {"scale2": {"min_size": 8}}})",
           R"({"blur": {"scale2": {"iso_sigma_min": 3, "iso_sigma_max": 1}}})",
           R"({"sensor_noise": {"pattern": "RGBG"}})",
           R"({"enable": {"final_jpeg": true}})",
           R"({"scale": "two"})",
           R"([1, 2])",
       }) {
    EXPECT_THROW(df::parse_config(doc), df::ConfigError) << doc;
  }
}

TEST(Config, LoadFromFile) {
  const fs::path dir = scratch("config");
  std::ofstream(dir / "c.json") << R"({"scale": 4})";
  EXPECT_EQ(df::load_config(dir / "c.json").scale, 4);
  EXPECT_THROW(df::load_config(dir / "missing.json"), df::ConfigError);
  std::ofstream(dir / "bad.json") << R"({"scale": 5})";
  try {
    df::load_config(dir / "bad.json");
    FAIL();
  } catch (const df::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
}

TEST(Config, ExternalCalibrationPool) {
  const fs::path dir = scratch("pool");
  std::ofstream(dir / "pool.json") << df::CalibrationPool::builtin().to_json().dump(2);
  DegradationConfig cfg;
  cfg.sensor_noise_prob = 1.0;
  DegradationConfig ext = cfg;
  ext.calibration_pool = (dir / "pool.json").string();
  const ImageF hr = hr_crop("coffee", 64);
  const auto a = df::degrade(hr, cfg, 5);
  const auto b = df::degrade(hr, ext, 5);
  EXPECT_TRUE(bit_equal(a.output.lr, b.output.lr));
  EXPECT_EQ(df::parse_manifest(df::serialize_manifest(b.manifest)).config.calibration_pool, ext.calibration_pool);
  EXPECT_TRUE(bit_equal(df::replay(hr, b.manifest).lr, b.output.lr));

  ext.calibration_pool = (dir / "absent.json").string();
  EXPECT_THROW(df::degrade(hr, ext, 5), df::ConfigError);
}
