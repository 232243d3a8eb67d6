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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace df = degrade_forge;
namespace fs = std::filesystem;
using df::DatasetJob;
using df::ImageF;
using df::TestsetKind;

namespace {

using Tree = std::map<std::string, std::vector<std::uint8_t>>;

Tree read_tree(const fs::path& root) {
  Tree t;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) t[fs::relative(e.path(), root).string()] = df::read_file_bytes(e.path());
  return t;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("df_dataset_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ImageF centre(const ImageF& img, int h, int w) {
  return df::crop(img, (img.height() - h) / 2, (img.width() - w) / 2, h, w);
}

// Input folder with 128x128 crops of the first `n` corpus images.
fs::path make_input(const std::string& name, int n, int side = 128) {
  const fs::path dir = scratch(name);
  for (int i = 0; i < n; ++i) {
    const std::string& img = df_test::corpus_names()[i];
    df::write_png(dir / (img + ".png"), centre(df_test::load(img), side, side));
  }
  return dir;
}

bool bit_equal(const ImageF& a, const ImageF& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    if (a.samples()[i] != b.samples()[i]) return false;
  return true;
}

// Studio-swing luma and 10 log10(1 / MSE).
double oracle_psnr(const ImageF& a, const ImageF& b) {
  double se = 0.0;
  for (int r = 0; r < a.height(); ++r)
    for (int c = 0; c < a.width(); ++c) {
      auto y = [&](const ImageF& m) { return (16 + 65.481 * m(r, c, 0) + 128.553 * m(r, c, 1) + 24.966 * m(r, c, 2)) / 255; };
      se += std::pow(y(a) - y(b), 2);
    }
  return -10 * std::log10(se / (a.height() * a.width()));
}

// Variance of the 4-neighbour Laplacian of the studio-swing luma, reflect-101 borders.
double oracle_laplacian_variance(const ImageF& img) {
  const int h = img.height(), w = img.width();
  auto m = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  auto y = [&](int r, int c) {
    r = m(r, h);
    c = m(c, w);
    return (16 + 65.481 * img(r, c, 0) + 128.553 * img(r, c, 1) + 24.966 * img(r, c, 2)) / 255;
  };
  std::vector<double> v;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) v.push_back(y(r - 1, c) + y(r + 1, c) + y(r, c - 1) + y(r, c + 1) - 4 * y(r, c));
  double mean = 0.0;
  for (double x : v) mean += x / v.size();
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean) / v.size();
  return var;
}

ImageF box3(const ImageF& img) {
  ImageF out(img.height(), img.width(), 3);
  auto m = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      for (int q = 0; q < 3; ++q) {
        double s = 0.0;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) s += img(m(r + dr, img.height()), m(c + dc, img.width()), q);
        out(r, c, q) = s / 9;
      }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// psnr_y

TEST(PsnrY, IdenticalIsInfinity) {
  for (const auto& name : df_test::corpus_names()) {
    const ImageF a = df_test::load(name);
    EXPECT_EQ(df::psnr_y(a, a), std::numeric_limits<double>::infinity());
  }
  const ImageF z(4, 4, 3, 0.0);
  EXPECT_EQ(df::psnr_y(z, z), std::numeric_limits<double>::infinity());
}

TEST(PsnrY, ClosedFormTwentyDecibels) {
  const ImageF a = df_test::random_image(32, 48, 3, 1);
  ImageF b = a;
  // A uniform RGB offset d moves Y by d * 219 / 255; pick d for a 0.1 luma shift.
  const double d = 0.1 * 255.0 / 219.0;
  for (double& v : b.samples()) v += d;
  EXPECT_NEAR(df::psnr_y(a, b), 20.0, 1e-9);
}

TEST(PsnrY, MatchesOracleOnNaturalPair) {
  const ImageF hr = df::center_crop_to_multiple(df_test::load("coffee"), 4);
  const ImageF lr = df::resize(hr, hr.height() / 4, hr.width() / 4, df::Interp::kBicubic, true);
  const ImageF up = df::resize(lr, hr.height(), hr.width(), df::Interp::kBilinear, false);
  EXPECT_NEAR(df::psnr_y(hr, up), oracle_psnr(hr, up), 1e-6);
  const ImageF jpg = df::jpeg_round_trip(hr, 40).image;
  EXPECT_NEAR(df::psnr_y(hr, jpg), oracle_psnr(hr, jpg), 1e-6);
}

TEST(PsnrY, SymmetricAndRejectsMismatch) {
  const ImageF a = df_test::load("chelsea");
  const ImageF b = df::jpeg_round_trip(a, 30).image;
  EXPECT_EQ(df::psnr_y(a, b), df::psnr_y(b, a));
  EXPECT_THROW(df::psnr_y(a, df::crop(a, 0, 0, 10, 10)), df::InvalidArgument);
  EXPECT_THROW(df::psnr_y(ImageF(4, 4, 1, 0.0), ImageF(4, 4, 1, 0.0)), df::InvalidArgument);
  EXPECT_THROW(df::psnr_y(ImageF(), ImageF()), df::InvalidArgument);
}

// ---------------------------------------------------------------------------
// crop_patch_pairs

TEST(PatchPairs, ExactSizeHasOneOrigin) {
  const ImageF hr = centre(df_test::load("astronaut"), 144, 144);
  const ImageF lr = df::resize(hr, 72, 72, df::Interp::kBicubic, true);
  df::Rng rng(3);
  for (const auto& p : df::crop_patch_pairs(hr, lr, 2, 10, rng)) {
    EXPECT_EQ(p.lr_row, 0);
    EXPECT_EQ(p.lr_col, 0);
    EXPECT_TRUE(bit_equal(p.lr, lr));
    EXPECT_TRUE(bit_equal(p.hr, hr));
  }
}

TEST(PatchPairs, GeometryAndDeterminism) {
  const ImageF hr = df::center_crop_to_multiple(df_test::load("rocket"), 4);
  const ImageF lr = df::resize(hr, hr.height() / 4, hr.width() / 4, df::Interp::kBicubic, true);
  df::Rng r1(9), r2(9);
  const auto a = df::crop_patch_pairs(hr, lr, 4, 50, r1);
  const auto b = df::crop_patch_pairs(hr, lr, 4, 50, r2);
  ASSERT_EQ(a.size(), 50u);
  std::set<std::pair<int, int>> origins;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].lr_row, b[k].lr_row);
    EXPECT_EQ(a[k].lr_col, b[k].lr_col);
    EXPECT_EQ(a[k].lr.height(), 72);
    EXPECT_EQ(a[k].hr.height(), 288);
    EXPECT_EQ(a[k].hr.width(), 288);
    EXPECT_LE(a[k].lr_row, lr.height() - 72);
    EXPECT_LE(a[k].lr_col, lr.width() - 72);
    EXPECT_TRUE(bit_equal(a[k].hr, df::crop(hr, 4 * a[k].lr_row, 4 * a[k].lr_col, 288, 288)));
    origins.insert({a[k].lr_row, a[k].lr_col});
  }
  EXPECT_GT(origins.size(), 40u);
}

TEST(PatchPairs, OriginsCoverTheValidRange) {
  const ImageF hr(2 * 90, 2 * 80, 3, 0.5);
  const ImageF lr(90, 80, 3, 0.5);
  df::Rng rng(21);
  std::vector<int> rows(90 - 72 + 1), cols(80 - 72 + 1);
  for (int k = 0; k < 19000; ++k) {
    const auto p = df::crop_patch_pairs(hr, lr, 2, 1, rng).front();
    rows[p.lr_row]++;
    cols[p.lr_col]++;
  }
  for (int c : rows) EXPECT_NEAR(c, 1000, 150);
  for (int c : cols) EXPECT_NEAR(c, 19000 / 9.0, 250);
}

TEST(PatchPairs, FieldOfViewIsAligned) {
  for (int s : {2, 4}) {
    const ImageF hr = df::center_crop_to_multiple(df_test::load("astronaut"), 4);
    const ImageF lr = df::resize(hr, hr.height() / s, hr.width() / s, df::Interp::kBicubic, true);
    df::Rng rng(s);
    const auto pairs = df::crop_patch_pairs(hr, lr, s, 2, rng);
    for (const auto& p : pairs) {
      const ImageF up = df::resize(p.lr, 72 * s, 72 * s, df::Interp::kNearest, false);
      const auto [dy, dx] = df_test::phase_correlation(p.hr, up);
      EXPECT_LE(std::abs(dy), 0.5 * (s - 1) + 1e-9) << s;
      EXPECT_LE(std::abs(dx), 0.5 * (s - 1) + 1e-9) << s;
    }
  }
}

TEST(PatchPairs, Rejections) {
  df::Rng rng(1);
  EXPECT_THROW(df::crop_patch_pairs(ImageF(142, 144, 3), ImageF(71, 72, 3), 2, 1, rng), df::InvalidArgument);
  EXPECT_THROW(df::crop_patch_pairs(ImageF(150, 144, 3), ImageF(72, 72, 3), 2, 1, rng), df::InvalidArgument);
}

// ---------------------------------------------------------------------------
// generate_pairs

TEST(GeneratePairs, EmptyInputSucceedsWithWarning) {
  const fs::path in = scratch("empty_in"), out = scratch("empty_out");
  std::vector<std::string> warnings;
  DatasetJob job;
  job.input_dir = in;
  job.output_dir = out;
  job.log = [&](df::LogLevel l, const std::string& m) {
    if (l == df::LogLevel::kWarn) warnings.push_back(m);
  };
  const auto s = df::generate_pairs(job);
  EXPECT_EQ(s.found, 0);
  EXPECT_EQ(s.processed, 0);
  EXPECT_EQ(s.pairs_written, 0);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(GeneratePairs, WritesTriplesDeterministically) {
  const fs::path in = make_input("triples_in", 3);
  DatasetJob job;
  job.input_dir = in;
  job.master_seed = 42;
  job.variants = 2;
  job.blur_threshold = 0.0;

  job.output_dir = scratch("triples_a");
  const auto s = df::generate_pairs(job);
  EXPECT_EQ(s.found, 3);
  EXPECT_EQ(s.processed, 3);
  EXPECT_EQ(s.pairs_written, 6);
  const Tree a = read_tree(job.output_dir);
  EXPECT_EQ(a.size(), 18u);
  for (const auto& name : {"astronaut", "chelsea", "coffee"})
    for (int v : {0, 1}) {
      const std::string stem = std::string(name) + "_" + std::to_string(v);
      EXPECT_TRUE(a.count("HR/" + stem + ".png")) << stem;
      EXPECT_TRUE(a.count("LR/" + stem + ".jpg")) << stem;
      EXPECT_TRUE(a.count("manifests/" + stem + ".json")) << stem;
    }

  job.output_dir = scratch("triples_b");
  df::generate_pairs(job);
  EXPECT_EQ(read_tree(job.output_dir), a);

  job.output_dir = scratch("triples_c");
  job.workers = 8;
  df::generate_pairs(job);
  EXPECT_EQ(read_tree(job.output_dir), a);

  job.output_dir = scratch("triples_d");
  job.workers = 1;
  job.master_seed = 43;
  df::generate_pairs(job);
  EXPECT_NE(read_tree(job.output_dir), a);
}

TEST(GeneratePairs, ManifestsReplayToLrBytes) {
  const fs::path in = make_input("replay_in", 4, 96);
  DatasetJob job;
  job.input_dir = in;
  job.output_dir = scratch("replay_out");
  job.config.scale = 4;
  job.variants = 3;
  job.blur_threshold = 0.0;
  df::generate_pairs(job);
  int checked = 0;
  for (const auto& e : fs::directory_iterator(job.output_dir / "manifests")) {
    const std::string stem = e.path().stem().string();
    const auto doc = df::read_file_bytes(e.path());
    const df::Manifest m = df::parse_manifest(std::string(doc.begin(), doc.end()));
    const ImageF hr = df::read_image(job.output_dir / "HR" / (stem + ".png"));
    const auto out = df::replay(hr, m);
    EXPECT_EQ(out.lr_jpeg, df::read_file_bytes(job.output_dir / "LR" / (stem + ".jpg"))) << stem;
    const auto dec = df::decode_jpeg(out.lr_jpeg);
    EXPECT_EQ(dec.height, 24);
    EXPECT_EQ(dec.width, 24);
    ++checked;
  }
  EXPECT_EQ(checked, 12);
}

TEST(GeneratePairs, RejectsBlurryImages) {
  const fs::path in = scratch("blur_in");
  const ImageF sharp = centre(df_test::load("astronaut"), 128, 128);
  const ImageF blurred = df::from_u8(df::quantize_u8(box3(sharp)), 128, 128, 3);
  df::write_png(in / "a_sharp.png", sharp);
  df::write_png(in / "b_blurred.png", blurred);
  const double v_sharp = oracle_laplacian_variance(sharp);
  const double v_blur = oracle_laplacian_variance(blurred);
  ASSERT_LT(v_blur, v_sharp);
  EXPECT_NEAR(df::laplacian_variance(sharp), v_sharp, 1e-12);

  DatasetJob job;
  job.input_dir = in;
  job.output_dir = scratch("blur_out");
  job.blur_threshold = std::sqrt(v_sharp * v_blur);
  const auto s = df::generate_pairs(job);
  EXPECT_EQ(s.processed, 1);
  EXPECT_EQ(s.rejected_blurry, 1);
  EXPECT_EQ(s.blur_threshold, job.blur_threshold);
  EXPECT_TRUE(fs::exists(job.output_dir / "HR" / "a_sharp_0.png"));
  EXPECT_FALSE(fs::exists(job.output_dir / "HR" / "b_blurred_0.png"));
}

TEST(GeneratePairs, DefaultThresholdKeepsCorpus) {
  const fs::path in = make_input("default_in", 4, 96);
  DatasetJob job;
  job.input_dir = in;
  job.output_dir = scratch("default_out");
  const auto s = df::generate_pairs(job);
  EXPECT_EQ(s.processed, 4);
  EXPECT_EQ(s.rejected_blurry, 0);
  EXPECT_EQ(s.blur_threshold, df::kDefaultBlurThreshold);

  const fs::path flat = scratch("flat_in");
  df::write_png(flat / "flat.png", ImageF(64, 64, 3, 0.4));
  job.input_dir = flat;
  job.output_dir = scratch("flat_out");
  EXPECT_EQ(df::generate_pairs(job).rejected_blurry, 1);
}

TEST(GeneratePairs, SkipsUnreadableFiles) {
  const fs::path in = make_input("unreadable_in", 1, 96);
  std::ofstream(in / "broken.png") << "not a png";
  std::ofstream(in / "notes.txt") << "ignored";
  DatasetJob job;
  job.input_dir = in;
  job.output_dir = scratch("unreadable_out");
  int warnings = 0;
  job.log = [&](df::LogLevel l, const std::string&) { warnings += l == df::LogLevel::kWarn; };
  const auto s = df::generate_pairs(job);
  EXPECT_EQ(s.found, 2);
  EXPECT_EQ(s.processed, 1);
  EXPECT_EQ(s.skipped_unreadable, 1);
  EXPECT_EQ(warnings, 1);
}

TEST(GeneratePairs, EmitsAlignedPatches) {
  const fs::path in = make_input("patch_in", 2, 160);
  DatasetJob job;
  job.input_dir = in;
  job.output_dir = scratch("patch_out");
  job.patches_per_variant = 3;
  job.blur_threshold = 0.0;
  const auto s = df::generate_pairs(job);
  EXPECT_EQ(s.patches_written, 6);
  const ImageF hr = df::read_image(job.output_dir / "patches" / "HR" / "astronaut_0_1.png");
  const ImageF lr = df::read_image(job.output_dir / "patches" / "LR" / "astronaut_0_1.png");
  EXPECT_EQ(hr.height(), 144);
  EXPECT_EQ(lr.height(), 72);

  job.lr_patch = 100;
  job.output_dir = scratch("patch_too_big");
  EXPECT_THROW(df::generate_pairs(job), df::InvalidArgument);
}

TEST(GeneratePairs, JobErrors) {
  const fs::path in = make_input("err_in", 1, 64);
  const fs::path blocker = scratch("err_blocker") / "file";
  std::ofstream(blocker) << "x";
  DatasetJob job;
  job.input_dir = in;
  job.output_dir = blocker / "out";
  EXPECT_THROW(df::generate_pairs(job), df::JobError);
  job.output_dir = scratch("err_out");
  job.input_dir = in / "missing";
  EXPECT_THROW(df::generate_pairs(job), df::JobError);
  job.input_dir = in;
  job.variants = 0;
  EXPECT_THROW(df::generate_pairs(job), df::InvalidArgument);
  job.variants = 1;
  job.config.scale = 3;
  EXPECT_THROW(df::generate_pairs(job), df::ConfigError);
}

// ---------------------------------------------------------------------------
// make_testset

TEST(Testset, SizesForAllKinds) {
  const fs::path in = scratch("ts_in");
  for (const auto& name : df_test::corpus_names()) df::write_png(in / (name + ".png"), df_test::load(name));
  for (TestsetKind kind : {TestsetKind::kI, TestsetKind::kII, TestsetKind::kIII, TestsetKind::kIV}) {
    const fs::path out = scratch("ts_out_" + std::to_string(static_cast<int>(kind)));
    const auto s = df::make_testset(kind, in, out, 7, 2);
    ASSERT_EQ(s.items.size(), 4u);
    for (const auto& item : s.items) {
      const ImageF hr = df::read_image(out / "HR" / (item.name + ".png"));
      const fs::path lr_path = out / "LR" / (item.name + (kind == TestsetKind::kI || kind == TestsetKind::kII ? ".png" : ".jpg"));
      ASSERT_TRUE(fs::exists(lr_path)) << lr_path;
      const ImageF lr = df::read_image(lr_path);
      EXPECT_EQ(hr.height() % 16, 0);
      EXPECT_EQ(lr.height() * 4, hr.height());
      EXPECT_EQ(lr.width() * 4, hr.width());
      EXPECT_TRUE(fs::exists(out / "manifests" / (item.name + ".json")));
      if (kind == TestsetKind::kIII || kind == TestsetKind::kIV) {
        EXPECT_EQ(df::replay(hr, item.manifest).lr_jpeg, df::read_file_bytes(lr_path));
      } else {
        EXPECT_TRUE(bit_equal(df::from_u8(df::quantize_u8(df::replay(hr, item.manifest).lr), lr.height(), lr.width(), 3), lr));
      }
    }
  }
}

TEST(Testset, TypeIEqualsBicubicResize) {
  df::Rng rng(1);
  const ImageF hr = df::center_crop_to_multiple(df_test::load("rocket"), 16);
  const auto out = df::execute_plan(hr, df::testset_plan(TestsetKind::kI, rng));
  EXPECT_LE(df_test::max_abs_diff(out.lr, df::resize(hr, hr.height() / 4, hr.width() / 4, df::Interp::kBicubic, true)),
            1e-12);
  EXPECT_TRUE(out.lr_jpeg.empty());
}

TEST(Testset, TypeIIIQualities) {
  df::Rng rng(314);
  int lo = 100, hi = 0;
  for (int i = 0; i < 400; ++i) {
    const auto p = df::testset_plan(TestsetKind::kIII, rng);
    ASSERT_FALSE(p.final_jpeg_bypass);
    ASSERT_GE(p.final_jpeg.quality, 41);
    ASSERT_LE(p.final_jpeg.quality, 90);
    lo = std::min(lo, p.final_jpeg.quality);
    hi = std::max(hi, p.final_jpeg.quality);
  }
  EXPECT_LE(lo, 45);
  EXPECT_GE(hi, 86);
}

TEST(Testset, PlansHaveDocumentedShape) {
  df::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto two = df::testset_plan(TestsetKind::kII, rng);
    ASSERT_EQ(two.ops.size(), 2u);
    EXPECT_EQ(two.ops[0].kind, df::OpKind::kAnisoBlur);
    const auto& d = std::get<df::DownSpec>(two.ops[1].params);
    EXPECT_EQ(d.method, df::DownMethod::kNearest);
    EXPECT_EQ(d.scale, 4);
    EXPECT_TRUE(two.final_jpeg_bypass);

    const auto three = df::testset_plan(TestsetKind::kIII, rng);
    ASSERT_EQ(three.ops.size(), 3u);
    EXPECT_EQ(std::get<df::DownSpec>(three.ops[1].params).method, df::DownMethod::kNearest);
    EXPECT_EQ(std::get<df::DownSpec>(three.ops[2].params).method, df::DownMethod::kBicubic);

    const auto four = df::testset_plan(TestsetKind::kIV, rng);
    EXPECT_EQ(four.scale, 4);
    EXPECT_FALSE(four.final_jpeg_bypass);
  }
}

TEST(Testset, DeterministicAcrossWorkers) {
  const fs::path in = make_input("ts_det_in", 3, 128);
  const fs::path a = scratch("ts_det_a"), b = scratch("ts_det_b");
  df::make_testset(TestsetKind::kIV, in, a, 11, 1);
  df::make_testset(TestsetKind::kIV, in, b, 11, 8);
  EXPECT_EQ(read_tree(a), read_tree(b));
}

// ---------------------------------------------------------------------------
// Directory PSNR and previews

TEST(PsnrDirectories, PairsByStem) {
  const fs::path ref = scratch("psnr_ref"), dist = scratch("psnr_dist");
  const ImageF a = centre(df_test::load("coffee"), 64, 64);
  df::write_png(ref / "a.png", a);
  df::write_png(ref / "b.png", a);
  df::write_png(ref / "c.png", a);
  df::write_file_bytes(dist / "a.jpg", df::jpeg_round_trip(a, 50).bytes);
  df::write_png(dist / "b.png", a);
  df::write_png(dist / "c.png", df::crop(a, 0, 0, 32, 32));
  const auto entries = df::psnr_directories(ref, dist);
  ASSERT_EQ(entries.size(), 3u);
  ASSERT_TRUE(entries[0].psnr.has_value());
  EXPECT_NEAR(*entries[0].psnr, df::psnr_y(a, df::jpeg_round_trip(a, 50).image), 1e-12);
  EXPECT_EQ(*entries[1].psnr, std::numeric_limits<double>::infinity());
  EXPECT_FALSE(entries[2].psnr.has_value());
  EXPECT_FALSE(entries[2].error.empty());
  fs::remove(dist / "a.jpg");
  EXPECT_FALSE(df::psnr_directories(ref, dist)[0].psnr.has_value());
}

TEST(ContactSheet, Layout) {
  const ImageF hr = centre(df_test::load("chelsea"), 64, 96);
  const ImageF lr = df::resize(hr, 16, 24, df::Interp::kBicubic, true);
  const ImageF sheet = df::contact_sheet(hr, lr);
  EXPECT_EQ(sheet.height(), 64);
  EXPECT_EQ(sheet.width(), 96 + 8 + 96);
  EXPECT_TRUE(bit_equal(df::crop(sheet, 0, 0, 64, 96), hr));
  for (int r = 0; r < 64; ++r) EXPECT_EQ(sheet(r, 100, 1), 1.0);
  EXPECT_EQ(sheet(5, 104 + 9, 0), lr(1, 2, 0));
}
