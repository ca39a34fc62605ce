// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "vostk/grid.hpp"
#include "vostk/numerics.hpp"

namespace vostk {

/// Forward value and gradient with respect to the predicted probability map.
struct LossOut {
  double value = 0.0;
  Grid2D grad;
};

/// Coefficients of the hybrid loss: ce * CE + ssim * SSIM + iou * IoU.
struct LossWeights {
  double ce = 1.0;
  double ssim = 1.0;
  double iou = 1.0;

  /// Throws InvalidArgument unless all three are finite and >= 0.
  void validate() const;
};

inline constexpr double kProbEpsilon = 1e-7;
inline constexpr double kIouEpsilon = 1e-7;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Binary cross-entropy, mean over pixels. Predictions are clamped to
/// [1e-7, 1 - 1e-7]; the gradient is zero where the clamp is active.
/// Throws DimensionError on shape mismatch, InvalidArgument if the target
/// holds anything other than 0 or 1.
LossOut ce_loss(const Grid2D& pred, const Grid2D& target);

/// Per-pixel SSIM index between two maps (mirror-padded local statistics).
Grid2D ssim_map(const Grid2D& a, const Grid2D& b, const GaussianWindow& window = {});

/// 1 - mean(SSIM(pred, target)). The value lies in [0, 2].
LossOut ssim_loss(const Grid2D& pred, const Grid2D& target, const GaussianWindow& window = {});

/// Soft Jaccard loss 1 - sum(p t) / (sum(p + t - p t) + 1e-7).
/// Two empty maps give a value of 1.
LossOut iou_loss(const Grid2D& pred, const Grid2D& target);

/// Weighted sum of the three losses. Components with a zero weight are not
/// evaluated, so (l, 0, 0) reproduces l * ce_loss exactly.
LossOut total_loss(const Grid2D& pred, const Grid2D& target, const LossWeights& weights = {},
                   const GaussianWindow& window = {});

/// Multi-object form: total_loss per object channel, averaged over channels.
/// Each gradient entry is the gradient for the matching channel.
struct MultiLossOut {
  double value = 0.0;
  std::vector<Grid2D> grads;
};
MultiLossOut total_loss(std::span<const Grid2D> preds, std::span<const Grid2D> targets,
                        const LossWeights& weights = {}, const GaussianWindow& window = {});

struct ToyFit {
  std::vector<double> params;        // d weights followed by the bias
  std::vector<double> loss_history;  // steps + 1 entries, the first before any update
};

/// Per-pixel logistic model sigmoid(w . f + b) trained by plain gradient
/// descent on total_loss. Parameters start at zero.
ToyFit fit_toy_segmenter(std::span<const Grid2D> features, const Grid2D& target,
                         const LossWeights& weights, int steps, double lr);

/// Probability map of the toy model for the given parameters.
Grid2D toy_predict(std::span<const Grid2D> features, std::span<const double> params);

}  // namespace vostk
