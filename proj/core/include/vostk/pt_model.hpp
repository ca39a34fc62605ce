// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vostk/bbox.hpp"
#include "vostk/checkpoint.hpp"
#include "vostk/grid.hpp"

namespace vostk {

/// tanh-approximation GeLU.
double gelu(double x) noexcept;
double gelu_grad(double x) noexcept;

/// Affine layer y = W x + b, W stored row-major as out x in.
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(int in_dim, int out_dim)
      : in(in_dim), out(out_dim), weight(static_cast<std::size_t>(in_dim) * out_dim, 0.0),
        bias(static_cast<std::size_t>(out_dim), 0.0) {}

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Motion predictor of the parametric tracker: layer widths
/// 4-64-64-64-64-4, GeLU between layers, identity after the last one.
/// Motions are divided by norm_scale * frame diagonal on the way in and
/// multiplied back on the way out.
struct Mlp {
  static constexpr std::array<int, 6> kWidths{4, 64, 64, 64, 64, 4};

  std::vector<DenseLayer> layers;
  double norm_scale = 0.1;

  /// All-zero network with the given widths (defaults to kWidths).
  Mlp();
  explicit Mlp(std::span<const int> widths);

  int input_dim() const noexcept { return layers.front().in; }
  int output_dim() const noexcept { return layers.back().out; }
  std::size_t parameter_count() const noexcept;

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

/// Gradient with the same layout as Mlp::layers.
using MlpGrad = std::vector<DenseLayer>;
MlpGrad zeros_like(const Mlp& model);

/// Pre-activations and activations of one forward pass.
/// activations[0] is the input; activations[i+1] is the output of layer i.
struct MlpCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> activations;
};

/// Hidden layers He-uniform in +-sqrt(6 / fan_in), output layer and all
/// biases zero: the untrained model predicts zero motion.
Mlp make_pt_model(std::uint64_t seed);

/// Throws InvalidArgument on non-finite input, DimensionError on a size mismatch.
std::vector<double> mlp_forward(const Mlp& model, std::span<const double> input,
                                MlpCache* cache = nullptr);
Motion mlp_forward(const Mlp& model, const Motion& t);

/// Gradient of dot(output, upstream) with respect to every parameter.
/// Throws DimensionError if the cache does not belong to this model.
MlpGrad mlp_backward(const Mlp& model, const MlpCache& cache, std::span<const double> upstream);

/// Normalized motion prediction for a frame of the given size.
Motion predict_motion(const Mlp& model, const Motion& t, int frame_height, int frame_width);
/// prev + predicted motion, width and height clamped to >= 1 px.
BBox pt_predict(const Mlp& model, const BBox& prev, const BBox& prev2, int frame_height,
                int frame_width);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Adam with L2 weight decay folded into the gradient.
class Adam {
 public:
  Adam(const Mlp& model, AdamConfig config);
  void step(Mlp& model, const MlpGrad& grad);
  long steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  MlpGrad m_;
  MlpGrad v_;
  long t_ = 0;
};

struct PtLossOut {
  double value = 0.0;
  Motion grad;  // d value / d (x, y, w, h) of the predicted box
};

inline constexpr double kSmoothL1Beta = 1.0;

/// Sum of smooth-L1 terms over (x, y, w, h), scaled by lambda_small when the
/// predicted area is smaller than the ground-truth area.
PtLossOut pt_loss(const BBox& pred, const BBox& gt, double lambda_small = 2.0);

struct MotionTriple {
  Motion t_in;      // bb_prev - box two frames back
  BBox bb_prev;
  BBox bb_target;   // ground-truth box of the current frame
  int frame_height = 0;
  int frame_width = 0;
  std::uint8_t object_id = 0;
  int frame = 0;    // 1-based index of the target frame

  Motion target_motion() const noexcept { return bb_target - bb_prev; }
};

/// One triple per (object, frame >= 3) with the object present in the frame
/// and the two before it. Ordered by object id, then frame.
std::vector<MotionTriple> extract_triples(std::span<const LabelMask> gt_masks);

struct PtTrainConfig {
  int epochs = 100;
  int batch = 64;
  AdamConfig adam{};
  double lambda_small = 2.0;
  std::uint64_t seed = 0;
};

struct PtTrainResult {
  Mlp model;
  /// Mean pt_loss over the training set before training and after each epoch.
  std::vector<double> loss_history;
};

/// Mini-batch Adam on mean pt_loss. Deterministic for a fixed seed.
/// Throws ConfigError on an empty dataset.
PtTrainResult train_pt(const Mlp& model, std::span<const MotionTriple> data,
                       const PtTrainConfig& config);

double mean_pt_loss(const Mlp& model, std::span<const MotionTriple> data, double lambda_small);

/// ParamStore names: pt.layer{i}.weight [out, in], pt.layer{i}.bias [out],
/// pt.norm.scale [1].
ParamStore to_param_store(const Mlp& model);
/// Throws CheckpointError if an entry is missing or misshapen.
Mlp mlp_from_param_store(const ParamStore& store);

}  // namespace vostk
