// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vostk::cli {

namespace fs = std::filesystem;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitMissingDependency = 3;

struct SynthOptions {
  fs::path request;
  fs::path out;
  int jobs = 1;
};

struct FilterOptions {
  fs::path in;
  fs::path out;
  std::string variant = "cv";
  std::optional<fs::path> weights;
  double margin = 0.1;
  int jobs = 1;
  bool dump_overlay = false;
};

struct TrainPtOptions {
  std::vector<fs::path> corpora;
  fs::path out;
  int epochs = 100;
  int batch = 64;
  double lr = 1e-3;
  double lambda_small = 2.0;
  std::uint64_t seed = 0;
};

struct EvalOptions {
  fs::path pred;
  fs::path gt;
  fs::path report;
  std::string pred_subdir = "masks_pred";
  std::string gt_subdir = "masks_gt";
  int jobs = 1;
};

struct GradcheckOptions {
  std::uint64_t seed = 0;
  std::vector<int> sizes{8, 16, 32};
  int seeds = 10;
};

struct TransplantOptions {
  fs::path target;
  fs::path source;
  std::string prefix;
  fs::path out;
  bool strict = false;
};

// Each returns a process exit code; errors are reported on stderr.
int run_synth(const SynthOptions& opts);
int run_filter_cmd(const FilterOptions& opts);
int run_train_pt(const TrainPtOptions& opts);
int run_eval(const EvalOptions& opts);
int run_gradcheck_cmd(const GradcheckOptions& opts);
int run_transplant(const TransplantOptions& opts);

}  // namespace vostk::cli
