// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vostk {

struct GradCheckConfig {
  std::uint64_t seed = 0;
  std::vector<int> sizes{8, 16, 32};  // square loss instances, side length
  int seeds = 10;                     // random instances per size
  double step = 1e-5;                 // central-difference step h
};

struct GradCheckItem {
  std::string name;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  int instances = 0;
  bool passed() const noexcept { return max_rel_error < tolerance; }
};

/// |a - n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor);

/// Central finite differences against every analytic gradient: ce, iou
/// (1e-4), ssim, total (1e-3), gelu and the full MLP backward (1e-4).
/// Deterministic for a fixed config.
std::vector<GradCheckItem> run_gradcheck(const GradCheckConfig& config);

}  // namespace vostk
