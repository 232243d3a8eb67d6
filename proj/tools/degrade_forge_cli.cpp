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

// degrade-forge command line: dataset generation, test sets, PSNR, replay and
// previews. Exit status 0 on success, 1 on job errors, 2 on bad arguments.
// DEGRADE_FORGE_LOG sets the log level (trace, debug, info, warn, error, off).

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#ifdef DEGRADE_FORGE_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "degrade_forge/degrade_forge.hpp"

namespace df = degrade_forge;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitJob = 1;
constexpr int kExitArgs = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("degrade-forge");
  logger->set_pattern("%^[%l]%$ %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("DEGRADE_FORGE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("ignoring unknown DEGRADE_FORGE_LOG level '{}'", env);
    }
  }
}

df::LogFn job_logger() {
  return [](df::LogLevel level, const std::string& msg) {
    switch (level) {
      case df::LogLevel::kDebug: spdlog::debug(msg); break;
      case df::LogLevel::kInfo: spdlog::info(msg); break;
      case df::LogLevel::kWarn: spdlog::warn(msg); break;
      case df::LogLevel::kError: spdlog::error(msg); break;
    }
  };
}

df::DegradationConfig load_config(const std::string& path, std::optional<int> scale) {
  df::DegradationConfig cfg = path.empty() ? df::DegradationConfig{} : df::load_config(path);
  if (scale) {
    cfg.scale = *scale;
    df::validate(cfg);
  }
  return cfg;
}

void print_summary(const df::JobSummary& s) {
  std::cout << "found " << s.found << ", processed " << s.processed << ", rejected_blurry " << s.rejected_blurry
            << ", skipped " << s.skipped_unreadable << ", pairs " << s.pairs_written << ", patches "
            << s.patches_written << ", blur_threshold " << s.blur_threshold << "\n";
}

void write_lr(const fs::path& out, const df::ExecutionResult& r) {
  if (r.lr_jpeg.empty()) {
    df::write_png(out, r.lr);
  } else {
    std::string ext = out.extension().string();
    if (ext != ".jpg" && ext != ".jpeg") spdlog::warn("{} receives JPEG bytes", out.string());
    df::write_file_bytes(out, r.lr_jpeg);
  }
}

struct GenArgs {
  std::string in, out, config;
  std::optional<int> scale;
  std::uint64_t seed = 0;
  int variants = 1, workers = 1, patches = 0, lr_patch = df::kLrPatchSize;
  std::optional<double> blur_threshold;
};

int run_gen(const GenArgs& a) {
  df::DatasetJob job;
  job.input_dir = a.in;
  job.output_dir = a.out;
  job.config = load_config(a.config, a.scale);
  job.master_seed = a.seed;
  job.variants = a.variants;
  job.workers = a.workers;
  job.patches_per_variant = a.patches;
  job.lr_patch = a.lr_patch;
  if (a.blur_threshold) job.blur_threshold = *a.blur_threshold;
  job.log = job_logger();
  spdlog::info("generating x{} pairs from {} into {}", job.config.scale, a.in, a.out);
  print_summary(df::generate_pairs(job));
  return kExitOk;
}

struct TestsetArgs {
  std::string in, out;
  int kind = 4;
  std::uint64_t seed = 0;
  int workers = 1;
};

int run_testset(const TestsetArgs& a) {
  spdlog::info("building type {} test set from {} into {}", a.kind, a.in, a.out);
  const auto s = df::make_testset(static_cast<df::TestsetKind>(a.kind), a.in, a.out, a.seed, a.workers, job_logger());
  print_summary(s.job);
  return kExitOk;
}

int run_psnr(const std::string& ref, const std::string& dist) {
  const auto entries = df::psnr_directories(ref, dist);
  double sum = 0.0;
  int finite = 0, failed = 0;
  for (const auto& e : entries) {
    if (!e.psnr) {
      spdlog::error("{}: {}", e.name, e.error);
      ++failed;
      continue;
    }
    std::cout << e.name << "\t" << (std::isinf(*e.psnr) ? std::string("inf") : std::to_string(*e.psnr)) << "\n";
    if (std::isfinite(*e.psnr)) {
      sum += *e.psnr;
      ++finite;
    }
  }
  if (finite > 0) std::cout << "mean\t" << sum / finite << "\n";
  if (entries.empty()) spdlog::warn("no reference images in {}", ref);
  return failed ? kExitJob : kExitOk;
}

int run_replay(const std::string& manifest, const std::string& hr_path, const std::string& out) {
  const auto doc = df::read_file_bytes(manifest);
  const df::Manifest m = df::parse_manifest(std::string(doc.begin(), doc.end()));
  const df::ImageF hr = df::read_image(hr_path);
  const auto r = df::replay(hr, m);
  write_lr(out, r);
  spdlog::info("wrote {} ({}x{})", out, r.lr.height(), r.lr.width());
  return kExitOk;
}

int run_preview(const std::string& in, std::uint64_t seed, const std::string& config, std::optional<int> scale,
                std::string out) {
  const df::DegradationConfig cfg = load_config(config, scale);
  const df::ImageF hr = df::center_crop_to_multiple(df::read_image(in), 4 * cfg.scale);
  const auto r = df::degrade(hr, cfg, seed, df::resolve_pool(cfg), fs::path(in).filename().string());
  if (out.empty()) out = fs::path(in).stem().string() + "_preview.png";
  df::write_png(out, df::contact_sheet(hr, r.output.lr));
  std::cout << df::serialize_manifest(r.manifest);
  spdlog::info("wrote {}", out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Practical blind super-resolution degradation pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", df::kPipelineVersion);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate LR/HR training pairs with manifests");
  gen_cmd->add_option("--in", gen.in, "Input HR directory")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--scale", gen.scale, "Scale factor")->check(CLI::IsMember({2, 4}));
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--variants", gen.variants, "Degraded variants per image")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--config", gen.config, "Degradation config document")->check(CLI::ExistingFile);
  gen_cmd->add_option("--workers", gen.workers, "Worker threads")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--patches", gen.patches, "Patch pairs per variant")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--lr-patch", gen.lr_patch, "LR patch side")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--blur-threshold", gen.blur_threshold, "Laplacian variance cutoff (unit range)")
      ->check(CLI::NonNegativeNumber);

  TestsetArgs ts;
  auto* ts_cmd = app.add_subcommand("testset", "Build a x4 benchmark test set of type 1-4");
  ts_cmd->add_option("--kind", ts.kind, "Degradation type")->required()->check(CLI::IsMember({1, 2, 3, 4}));
  ts_cmd->add_option("--in", ts.in, "Input HR directory")->required();
  ts_cmd->add_option("--out", ts.out, "Output directory")->required();
  ts_cmd->add_option("--seed", ts.seed, "Seed");
  ts_cmd->add_option("--workers", ts.workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string ref, dist;
  auto* psnr_cmd = app.add_subcommand("psnr", "Y-channel PSNR between matching files of two directories");
  psnr_cmd->add_option("--ref", ref, "Reference directory")->required();
  psnr_cmd->add_option("--dist", dist, "Distorted directory")->required();

  std::string manifest, hr_path, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-create an LR image from its manifest");
  replay_cmd->add_option("--manifest", manifest, "Manifest document")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--hr", hr_path, "HR image")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_out, "Output LR file")->required();

  std::string preview_in, preview_config, preview_out;
  std::uint64_t preview_seed = 0;
  std::optional<int> preview_scale;
  auto* preview_cmd = app.add_subcommand("preview", "Write an HR/LR contact sheet and print the manifest");
  preview_cmd->add_option("--in", preview_in, "HR image")->required()->check(CLI::ExistingFile);
  preview_cmd->add_option("--seed", preview_seed, "Seed");
  preview_cmd->add_option("--config", preview_config, "Degradation config document")->check(CLI::ExistingFile);
  preview_cmd->add_option("--scale", preview_scale, "Scale factor")->check(CLI::IsMember({2, 4}));
  preview_cmd->add_option("--out", preview_out, "Output PNG (default <stem>_preview.png)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgs;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*ts_cmd) return run_testset(ts);
    if (*psnr_cmd) return run_psnr(ref, dist);
    if (*replay_cmd) return run_replay(manifest, hr_path, replay_out);
    if (*preview_cmd) return run_preview(preview_in, preview_seed, preview_config, preview_scale, preview_out);
  } catch (const df::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitArgs;
  } catch (const df::InvalidArgument& e) {
    spdlog::error("{}", e.what());
    return kExitArgs;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitJob;
  }
  return kExitArgs;
}
