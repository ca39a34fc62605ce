// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/pt_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "vostk/rng.hpp"

namespace vostk {
namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;
constexpr double kGeluCubic = 0.044715;

std::array<double, 4> as_array(const Motion& m) { return {m.dx, m.dy, m.dw, m.dh}; }
Motion as_motion(std::span<const double> v) { return {v[0], v[1], v[2], v[3]}; }

double frame_scale(const Mlp& model, int height, int width) {
  const double diag = std::hypot(static_cast<double>(height), static_cast<double>(width));
  return model.norm_scale * diag;
}

void smooth_l1(double d, double& value, double& grad) {
  const double a = std::abs(d);
  if (a < kSmoothL1Beta) {
    value = 0.5 * d * d / kSmoothL1Beta;
    grad = d / kSmoothL1Beta;
  } else {
    value = a - 0.5 * kSmoothL1Beta;
    grad = d > 0 ? 1.0 : -1.0;
  }
}

void accumulate(MlpGrad& acc, const MlpGrad& g) {
  for (std::size_t l = 0; l < acc.size(); ++l) {
    for (std::size_t i = 0; i < acc[l].weight.size(); ++i) acc[l].weight[i] += g[l].weight[i];
    for (std::size_t i = 0; i < acc[l].bias.size(); ++i) acc[l].bias[i] += g[l].bias[i];
  }
}

// Model output (normalized motion), box prediction and loss for one triple.
// When `grad` is non-null the parameter gradient scaled by `weight` is added.
double triple_loss(const Mlp& model, const MotionTriple& tr, double lambda_small, MlpGrad* grad,
                   double weight) {
  const double s = frame_scale(model, tr.frame_height, tr.frame_width);
  const auto in = as_array(tr.t_in * (1.0 / s));
  MlpCache cache;
  const auto out = mlp_forward(model, in, grad != nullptr ? &cache : nullptr);
  const BBox pred = tr.bb_prev + as_motion(out) * s;
  const PtLossOut loss = pt_loss(pred, tr.bb_target, lambda_small);
  if (grad != nullptr) {
    const auto g = as_array(loss.grad * (s * weight));
    accumulate(*grad, mlp_backward(model, cache, g));
  }
  return loss.value;
}

}  // namespace

double gelu(double x) noexcept {
  return 0.5 * x * (1.0 + std::tanh(kSqrt2OverPi * (x + kGeluCubic * x * x * x)));
}

double gelu_grad(double x) noexcept {
  const double u = kSqrt2OverPi * (x + kGeluCubic * x * x * x);
  const double th = std::tanh(u);
  const double du = kSqrt2OverPi * (1.0 + 3.0 * kGeluCubic * x * x);
  return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
}

Mlp::Mlp() : Mlp(kWidths) {}

Mlp::Mlp(std::span<const int> widths) {
  if (widths.size() < 2) throw InvalidArgument("Mlp needs at least one layer");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) layers.emplace_back(widths[i], widths[i + 1]);
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

MlpGrad zeros_like(const Mlp& model) {
  MlpGrad g;
  g.reserve(model.layers.size());
  for (const auto& l : model.layers) g.emplace_back(l.in, l.out);
  return g;
}

Mlp make_pt_model(std::uint64_t seed) {
  Mlp model;
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    const double bound = std::sqrt(6.0 / layer.in);
    for (auto& w : layer.weight) w = rng.uniform(-bound, bound);
  }
  return model;
}

std::vector<double> mlp_forward(const Mlp& model, std::span<const double> input, MlpCache* cache) {
  if (static_cast<int>(input.size()) != model.input_dim()) {
    throw DimensionError("mlp_forward: expected " + std::to_string(model.input_dim()) + " inputs");
  }
  for (double v : input) {
    if (!std::isfinite(v)) throw InvalidArgument("mlp_forward: non-finite input");
  }
  if (cache != nullptr) {
    cache->pre.clear();
    cache->activations.assign(1, std::vector<double>(input.begin(), input.end()));
  }
  std::vector<double> x(input.begin(), input.end());
  const std::size_t last = model.layers.size() - 1;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    std::vector<double> z(layer.bias);
    for (int o = 0; o < layer.out; ++o) {
      const double* w = &layer.weight[static_cast<std::size_t>(o) * layer.in];
      double acc = 0.0;
      for (int i = 0; i < layer.in; ++i) acc += w[i] * x[i];
      z[o] += acc;
    }
    std::vector<double> a(z);
    if (l != last) {
      for (auto& v : a) v = gelu(v);
    }
    if (cache != nullptr) {
      cache->pre.push_back(std::move(z));
      cache->activations.push_back(a);
    }
    x = std::move(a);
  }
  return x;
}

Motion mlp_forward(const Mlp& model, const Motion& t) {
  const auto in = as_array(t);
  return as_motion(mlp_forward(model, in));
}

MlpGrad mlp_backward(const Mlp& model, const MlpCache& cache, std::span<const double> upstream) {
  const std::size_t n = model.layers.size();
  if (cache.pre.size() != n || cache.activations.size() != n + 1 ||
      static_cast<int>(upstream.size()) != model.output_dim()) {
    throw DimensionError("mlp_backward: cache does not match the model");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (static_cast<int>(cache.pre[l].size()) != model.layers[l].out ||
        static_cast<int>(cache.activations[l].size()) != model.layers[l].in) {
      throw DimensionError("mlp_backward: cache does not match the model");
    }
  }
  MlpGrad grad = zeros_like(model);
  std::vector<double> delta(upstream.begin(), upstream.end());  // dL/d(activation of layer l)
  for (std::size_t l = n; l-- > 0;) {
    const auto& layer = model.layers[l];
    if (l != n - 1) {
      for (int o = 0; o < layer.out; ++o) delta[o] *= gelu_grad(cache.pre[l][o]);
    }
    const auto& x = cache.activations[l];
    auto& g = grad[l];
    std::vector<double> next(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      g.bias[o] = d;
      if (d == 0.0) continue;
      double* gw = &g.weight[static_cast<std::size_t>(o) * layer.in];
      const double* w = &layer.weight[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) {
        gw[i] = d * x[i];
        next[i] += d * w[i];
      }
    }
    delta = std::move(next);
  }
  return grad;
}

Motion predict_motion(const Mlp& model, const Motion& t, int frame_height, int frame_width) {
  const double s = frame_scale(model, frame_height, frame_width);
  return mlp_forward(model, t * (1.0 / s)) * s;
}

BBox pt_predict(const Mlp& model, const BBox& prev, const BBox& prev2, int frame_height,
                int frame_width) {
  BBox next = prev + predict_motion(model, prev - prev2, frame_height, frame_width);
  next.w = std::max(next.w, 1.0);
  next.h = std::max(next.h, 1.0);
  return next;
}

Adam::Adam(const Mlp& model, AdamConfig config)
    : config_(config), m_(zeros_like(model)), v_(zeros_like(model)) {}

void Adam::step(Mlp& model, const MlpGrad& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i] + config_.weight_decay * p[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * gi;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * gi * gi;
      p[i] -= config_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.eps);
    }
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weight, grad[l].weight, m_[l].weight, v_[l].weight);
    update(model.layers[l].bias, grad[l].bias, m_[l].bias, v_[l].bias);
  }
}

PtLossOut pt_loss(const BBox& pred, const BBox& gt, double lambda_small) {
  const double scale = pred.area() < gt.area() ? lambda_small : 1.0;
  const std::array<double, 4> d{pred.x - gt.x, pred.y - gt.y, pred.w - gt.w, pred.h - gt.h};
  std::array<double, 4> g{};
  double value = 0.0;
  for (int k = 0; k < 4; ++k) {
    double v = 0.0;
    smooth_l1(d[k], v, g[k]);
    value += v;
  }
  return {scale * value, Motion{g[0], g[1], g[2], g[3]} * scale};
}

std::vector<MotionTriple> extract_triples(std::span<const LabelMask> gt_masks) {
  std::vector<MotionTriple> triples;
  if (gt_masks.size() < 3) return triples;
  std::set<std::uint8_t> ids;
  for (const auto& m : gt_masks) {
    for (auto v : m.values()) {
      if (v != 0) ids.insert(v);
    }
  }
  for (auto id : ids) {
    std::optional<BBox> prev2 = bbox_from_mask(gt_masks[0], id);
    std::optional<BBox> prev = bbox_from_mask(gt_masks[1], id);
    for (std::size_t c = 2; c < gt_masks.size(); ++c) {
      const auto cur = bbox_from_mask(gt_masks[c], id);
      if (prev2 && prev && cur) {
        triples.push_back({*prev - *prev2, *prev, *cur, gt_masks[c].height(), gt_masks[c].width(),
                           id, static_cast<int>(c) + 1});
      }
      prev2 = prev;
      prev = cur;
    }
  }
  return triples;
}

double mean_pt_loss(const Mlp& model, std::span<const MotionTriple> data, double lambda_small) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& tr : data) total += triple_loss(model, tr, lambda_small, nullptr, 0.0);
  return total / static_cast<double>(data.size());
}

PtTrainResult train_pt(const Mlp& model, std::span<const MotionTriple> data,
                       const PtTrainConfig& config) {
  if (data.empty()) throw ConfigError("train_pt: no training triples");
  if (config.batch < 1) throw ConfigError("train_pt: batch must be >= 1");
  if (config.epochs < 0) throw ConfigError("train_pt: epochs must be >= 0");

  PtTrainResult result{model, {}};
  result.loss_history.push_back(mean_pt_loss(result.model, data, config.lambda_small));
  Adam adam(result.model, config.adam);
  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with the shared generator.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
      const double weight = 1.0 / static_cast<double>(end - start);
      MlpGrad grad = zeros_like(result.model);
      for (std::size_t k = start; k < end; ++k) {
        triple_loss(result.model, data[order[k]], config.lambda_small, &grad, weight);
      }
      adam.step(result.model, grad);
    }
    result.loss_history.push_back(mean_pt_loss(result.model, data, config.lambda_small));
  }
  return result;
}

ParamStore to_param_store(const Mlp& model) {
  ParamStore store;
  auto to_f32 = [](const std::vector<double>& v) { return std::vector<float>(v.begin(), v.end()); };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const std::string base = "pt.layer" + std::to_string(l);
    store.add(base + ".weight",
              {static_cast<std::uint32_t>(layer.out), static_cast<std::uint32_t>(layer.in)},
              to_f32(layer.weight));
    store.add(base + ".bias", {static_cast<std::uint32_t>(layer.out)}, to_f32(layer.bias));
  }
  store.add("pt.norm.scale", {1}, {static_cast<float>(model.norm_scale)});
  return store;
}

Mlp mlp_from_param_store(const ParamStore& store) {
  std::vector<int> widths;
  for (int l = 0;; ++l) {
    const auto* w = store.find("pt.layer" + std::to_string(l) + ".weight");
    if (w == nullptr) break;
    if (w->shape.size() != 2) {
      throw CheckpointError(CheckpointError::Kind::kShapeMismatch, "pt weight must be 2-D");
    }
    if (l == 0) widths.push_back(static_cast<int>(w->shape[1]));
    if (static_cast<int>(w->shape[1]) != widths.back()) {
      throw CheckpointError(CheckpointError::Kind::kShapeMismatch,
                            "pt layer " + std::to_string(l) + " input width mismatch");
    }
    widths.push_back(static_cast<int>(w->shape[0]));
  }
  if (widths.size() < 2) {
    throw CheckpointError(CheckpointError::Kind::kMissingEntry, "no pt.layer0.weight entry");
  }
  Mlp model(widths);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const std::string base = "pt.layer" + std::to_string(l);
    const auto& w = store.at(base + ".weight");
    const auto& b = store.at(base + ".bias");
    auto& layer = model.layers[l];
    if (b.data.size() != layer.bias.size()) {
      throw CheckpointError(CheckpointError::Kind::kShapeMismatch, base + ".bias has wrong length");
    }
    layer.weight.assign(w.data.begin(), w.data.end());
    layer.bias.assign(b.data.begin(), b.data.end());
  }
  const auto& scale = store.at("pt.norm.scale");
  if (scale.data.size() != 1 || !(scale.data[0] > 0.0f)) {
    throw CheckpointError(CheckpointError::Kind::kShapeMismatch, "pt.norm.scale must be one positive value");
  }
  model.norm_scale = scale.data[0];
  return model;
}

}  // namespace vostk
