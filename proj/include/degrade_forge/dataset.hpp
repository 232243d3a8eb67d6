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

#ifndef DEGRADE_FORGE_DATASET_HPP_
#define DEGRADE_FORGE_DATASET_HPP_

// Batch tooling: paired LR/HR generation with manifests, the four benchmark
// test-set degradations, training patch crops and PSNR on luma.
//
// Output layout: <out>/{HR,LR,manifests}/<stem>_<variant>.<ext>, and, when
// patches are requested, <out>/patches/{HR,LR}/<stem>_<variant>_<k>.png.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "degrade_forge/config.hpp"
#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/image_io.hpp"
#include "degrade_forge/manifest.hpp"
#include "degrade_forge/pipeline.hpp"
#include "degrade_forge/rng.hpp"

namespace degrade_forge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Metrics

// PSNR of the BT.601 luma, unit peak, computed over the full image (no
// border crop). Identical inputs give +infinity.
inline double psnr_y(const ImageF& a, const ImageF& b) {
  if (!a.same_shape(b)) {
    throw InvalidArgument("psnr_y: shapes differ (" + std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                          " vs " + std::to_string(b.height()) + "x" + std::to_string(b.width()) + ")");
  }
  if (a.empty()) throw InvalidArgument("psnr_y: empty images");
  const ImageF ya = rgb_to_ycbcr_y(a), yb = rgb_to_ycbcr_y(b);
  double se = 0.0;
  auto sa = ya.samples(), sb = yb.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / (se / static_cast<double>(sa.size())));
}

// ---------------------------------------------------------------------------
// Patches

inline constexpr int kLrPatchSize = 72;

struct PatchPair {
  int lr_row = 0, lr_col = 0;
  ImageF lr;
  ImageF hr;
};

inline std::vector<PatchPair> crop_patch_pairs(const ImageF& hr, const ImageF& lr, int scale, int count, Rng& rng,
                                               int lr_patch = kLrPatchSize) {
  if (lr.height() < lr_patch || lr.width() < lr_patch) {
    throw InvalidArgument("crop_patch_pairs: LR " + std::to_string(lr.height()) + "x" + std::to_string(lr.width()) +
                          " is smaller than the " + std::to_string(lr_patch) + " px patch");
  }
  if (hr.height() != lr.height() * scale || hr.width() != lr.width() * scale) {
    throw InvalidArgument("crop_patch_pairs: HR size is not LR size times scale");
  }
  std::vector<PatchPair> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    PatchPair p;
    p.lr_row = rng.uniform_int(0, lr.height() - lr_patch);
    p.lr_col = rng.uniform_int(0, lr.width() - lr_patch);
    p.lr = crop(lr, p.lr_row, p.lr_col, lr_patch, lr_patch);
    p.hr = crop(hr, p.lr_row * scale, p.lr_col * scale, lr_patch * scale, lr_patch * scale);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jobs

enum class LogLevel { kDebug, kInfo, kWarn, kError };
using LogFn = std::function<void(LogLevel, const std::string&)>;

// Default sharpness cutoff on the unit-range luma Laplacian variance; equals
// 100 on the 8-bit scale.
inline constexpr double kDefaultBlurThreshold = 100.0 / (255.0 * 255.0);

struct DatasetJob {
  fs::path input_dir;
  fs::path output_dir;
  DegradationConfig config;
  std::uint64_t master_seed = 0;
  int variants = 1;
  int workers = 1;
  int patches_per_variant = 0;
  int lr_patch = kLrPatchSize;
  double blur_threshold = kDefaultBlurThreshold;
  LogFn log;
};

struct JobSummary {
  int found = 0;
  int processed = 0;
  int rejected_blurry = 0;
  int skipped_unreadable = 0;
  int pairs_written = 0;
  int patches_written = 0;
  double blur_threshold = 0.0;
};

inline std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw JobError("input directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

namespace dataset_detail {

inline void make_dirs(const std::vector<fs::path>& dirs) {
  for (const auto& d : dirs) {
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec || !fs::is_directory(d)) throw JobError("cannot create output directory " + d.string());
  }
}

inline std::string item_name(const fs::path& src, int variant) {
  return src.stem().string() + "_" + std::to_string(variant);
}

inline void write_lr(const fs::path& lr_dir, const std::string& name, const ExecutionResult& out) {
  if (out.lr_jpeg.empty()) {
    write_png(lr_dir / (name + ".png"), out.lr);
  } else {
    write_file_bytes(lr_dir / (name + ".jpg"), out.lr_jpeg);
  }
}

inline void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Runs fn(i) for i in [0, n) on `workers` threads; rethrows the first error.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> stop{false};
  auto body = [&] {
    for (int i = next++; i < n && !stop; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  const int count = std::max(1, std::min(workers, n));
  if (count == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dataset_detail

inline void emit(const LogFn& log, LogLevel level, const std::string& msg) {
  if (log) log(level, msg);
}

// Per item (image i, variant v) the plan seed is derive_seed(master, i * V + v),
// so the tree does not depend on the worker count or scheduling.
inline JobSummary generate_pairs(const DatasetJob& job) {
  using namespace dataset_detail;
  if (job.variants < 1) throw InvalidArgument("generate_pairs: variants must be >= 1");
  if (job.workers < 1) throw InvalidArgument("generate_pairs: workers must be >= 1");
  validate(job.config);
  const CalibrationPool pool = resolve_pool(job.config);
  const auto files = list_images(job.input_dir);

  const fs::path hr_dir = job.output_dir / "HR", lr_dir = job.output_dir / "LR",
                 man_dir = job.output_dir / "manifests";
  std::vector<fs::path> dirs = {hr_dir, lr_dir, man_dir};
  if (job.patches_per_variant > 0) {
    dirs.push_back(job.output_dir / "patches" / "HR");
    dirs.push_back(job.output_dir / "patches" / "LR");
  }
  make_dirs(dirs);

  JobSummary summary;
  summary.found = static_cast<int>(files.size());
  summary.blur_threshold = job.blur_threshold;
  std::mutex mu;
  const int scale = job.config.scale;

  parallel_for(static_cast<int>(files.size()), job.workers, [&](int i) {
    const fs::path& src = files[static_cast<std::size_t>(i)];
    ImageF hr;
    try {
      hr = center_crop_to_multiple(read_image(src), 4 * scale);
    } catch (const std::exception& e) {
      emit(job.log, LogLevel::kWarn, "skipping " + src.string() + ": " + e.what());
      std::lock_guard lock(mu);
      ++summary.skipped_unreadable;
      return;
    }
    const double sharpness = laplacian_variance(hr);
    if (sharpness < job.blur_threshold) {
      emit(job.log, LogLevel::kInfo,
           "rejecting blurry " + src.string() + " (laplacian variance " + std::to_string(sharpness) + ")");
      std::lock_guard lock(mu);
      ++summary.rejected_blurry;
      return;
    }
    int patches = 0;
    for (int v = 0; v < job.variants; ++v) {
      const std::uint64_t item_seed = derive_seed(job.master_seed, static_cast<std::uint64_t>(i) * job.variants + v);
      DegradeResult r;
      try {
        r = degrade(hr, job.config, item_seed, pool, src.filename().string());
      } catch (const InvalidArgument& e) {
        emit(job.log, LogLevel::kWarn, "skipping " + src.string() + ": " + e.what());
        std::lock_guard lock(mu);
        ++summary.skipped_unreadable;
        return;
      }
      const std::string name = item_name(src, v);
      write_png(hr_dir / (name + ".png"), hr);
      write_lr(lr_dir, name, r.output);
      write_text(man_dir / (name + ".json"), serialize_manifest(r.manifest));
      if (job.patches_per_variant > 0) {
        Rng prng(derive_seed(item_seed, 0x70617463ULL));
        const auto pairs = crop_patch_pairs(hr, r.output.lr, scale, job.patches_per_variant, prng, job.lr_patch);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          const std::string pname = name + "_" + std::to_string(k) + ".png";
          write_png(job.output_dir / "patches" / "HR" / pname, pairs[k].hr);
          write_png(job.output_dir / "patches" / "LR" / pname, pairs[k].lr);
        }
        patches += static_cast<int>(pairs.size());
      }
    }
    std::lock_guard lock(mu);
    ++summary.processed;
    summary.pairs_written += job.variants;
    summary.patches_written += patches;
  });
  if (summary.found == 0) emit(job.log, LogLevel::kWarn, "no images found in " + job.input_dir.string());
  return summary;
}

// ---------------------------------------------------------------------------
// Benchmark test sets

enum class TestsetKind { kI = 1, kII = 2, kIII = 3, kIV = 4 };

inline constexpr int kTestsetScale = 4;

// I: bicubic x4, stored losslessly. II: anisotropic blur -> shift-corrected
// nearest x4, lossless. III: anisotropic blur -> nearest x2 -> bicubic x2 ->
// JPEG with quality in [41, 90]. IV: the full random pipeline at x4.
inline DegradationPlan testset_plan(TestsetKind kind, Rng& rng, const DegradationConfig& full = {}) {
  switch (kind) {
    case TestsetKind::kI:
      return classic_plan(ClassicKind::kBicubic, kTestsetScale);
    case TestsetKind::kII: {
      DegradationPlan plan;
      plan.scale = kTestsetScale;
      plan.final_jpeg_bypass = true;
      const BlurSpec blur = sample_blur_spec(BlurRanges::for_scale(4), BlurKind::kAniso, rng);
      DownSpec d;
      d.method = DownMethod::kNearest;
      d.scale = 4;
      d.pre_blur_sigma = rng.uniform(0.1, 0.6 * 4);
      plan.ops = {{OpKind::kAnisoBlur, true, blur}, {OpKind::kDown, true, d}};
      return plan;
    }
    case TestsetKind::kIII: {
      DegradationPlan plan;
      plan.scale = kTestsetScale;
      const BlurSpec blur = sample_blur_spec(BlurRanges::for_scale(2), BlurKind::kAniso, rng);
      DownSpec nearest;
      nearest.method = DownMethod::kNearest;
      nearest.scale = 2;
      nearest.pre_blur_sigma = rng.uniform(0.1, 0.6 * 2);
      DownSpec bicubic;
      bicubic.method = DownMethod::kBicubic;
      bicubic.scale = 2;
      plan.ops = {{OpKind::kAnisoBlur, true, blur}, {OpKind::kDown, true, nearest}, {OpKind::kDown, true, bicubic}};
      plan.final_jpeg = sample_jpeg_spec(41, 90, rng);
      return plan;
    }
    case TestsetKind::kIV: {
      DegradationConfig cfg = full;
      cfg.scale = kTestsetScale;
      return sample_plan(cfg, rng);
    }
  }
  throw InvalidArgument("unknown test-set kind");
}

struct TestsetItem {
  std::string name;
  Manifest manifest;
};

struct TestsetSummary {
  JobSummary job;
  std::vector<TestsetItem> items;  // in input order
};

inline TestsetSummary make_testset(TestsetKind kind, const fs::path& hr_dir, const fs::path& out_dir,
                                   std::uint64_t seed, int workers = 1, const LogFn& log = {}) {
  using namespace dataset_detail;
  const auto files = list_images(hr_dir);
  const fs::path hr_out = out_dir / "HR", lr_out = out_dir / "LR", man_out = out_dir / "manifests";
  make_dirs({hr_out, lr_out, man_out});
  DegradationConfig cfg;
  cfg.scale = kTestsetScale;

  TestsetSummary summary;
  summary.job.found = static_cast<int>(files.size());
  std::vector<std::optional<TestsetItem>> items(files.size());
  std::mutex mu;
  parallel_for(static_cast<int>(files.size()), workers, [&](int i) {
    const fs::path& src = files[static_cast<std::size_t>(i)];
    ImageF hr;
    try {
      hr = center_crop_to_multiple(read_image(src), 4 * kTestsetScale);
    } catch (const std::exception& e) {
      emit(log, LogLevel::kWarn, "skipping " + src.string() + ": " + e.what());
      std::lock_guard lock(mu);
      ++summary.job.skipped_unreadable;
      return;
    }
    const std::uint64_t item_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    Rng rng(derive_seed(item_seed, content_hash(hr)));
    DegradationPlan plan = testset_plan(kind, rng, cfg);
    plan.seed = item_seed;
    const CalibrationPool& pool = CalibrationPool::builtin();
    const ExecutionResult out = execute_plan(hr, plan, pool);
    Manifest m = make_manifest(hr, cfg, plan, out, src.filename().string());
    const std::string name = src.stem().string();
    write_png(hr_out / (name + ".png"), hr);
    write_lr(lr_out, name, out);
    write_text(man_out / (name + ".json"), serialize_manifest(m));
    items[static_cast<std::size_t>(i)] = TestsetItem{name, std::move(m)};
    std::lock_guard lock(mu);
    ++summary.job.processed;
    ++summary.job.pairs_written;
  });
  for (auto& it : items)
    if (it) summary.items.push_back(std::move(*it));
  return summary;
}

// ---------------------------------------------------------------------------
// Directory PSNR and previews

struct PsnrEntry {
  std::string name;
  std::optional<double> psnr;  // empty when the pair could not be compared
  std::string error;
};

// Pairs files by stem; every reference needs a distorted counterpart.
inline std::vector<PsnrEntry> psnr_directories(const fs::path& ref_dir, const fs::path& dist_dir) {
  const auto refs = list_images(ref_dir);
  const auto dists = list_images(dist_dir);
  std::vector<PsnrEntry> out;
  for (const auto& ref : refs) {
    PsnrEntry e;
    e.name = ref.stem().string();
    const auto it = std::find_if(dists.begin(), dists.end(), [&](const fs::path& p) { return p.stem() == ref.stem(); });
    if (it == dists.end()) {
      e.error = "no counterpart in " + dist_dir.string();
    } else {
      try {
        e.psnr = psnr_y(read_image(ref), read_image(*it));
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

// HR on the left, LR nearest-upscaled to the HR height on the right.
inline ImageF contact_sheet(const ImageF& hr, const ImageF& lr, int gap = 8) {
  const ImageF up = resize(lr, hr.height(), hr.height() * lr.width() / std::max(1, lr.height()), Interp::kNearest, false);
  ImageF sheet(hr.height(), hr.width() + gap + up.width(), 3, 1.0);
  for (int r = 0; r < hr.height(); ++r) {
    for (int c = 0; c < hr.width(); ++c)
      for (int q = 0; q < 3; ++q) sheet(r, c, q) = hr(r, c, q);
    for (int c = 0; c < up.width(); ++c)
      for (int q = 0; q < 3; ++q) sheet(r, hr.width() + gap + c, q) = up(r, c, q);
  }
  return sheet;
}

}  // namespace degrade_forge

#endif  // DEGRADE_FORGE_DATASET_HPP_
