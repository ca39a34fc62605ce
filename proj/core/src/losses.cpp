// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vostk {
namespace {

void require_binary(const Grid2D& target, const char* what) {
  for (double v : target.values()) {
    if (v != 0.0 && v != 1.0) {
      throw InvalidArgument(std::string(what) + ": target values must be 0 or 1");
    }
  }
}

void add_scaled(Grid2D& acc, const Grid2D& g, double scale) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * g[i];
}

struct SsimTerms {
  Grid2D map;
  // Partial derivatives of the per-pixel SSIM with respect to the local
  // mean of the prediction, its variance, and the covariance.
  Grid2D d_mean;
  Grid2D d_var;
  Grid2D d_cov;
  Grid2D mean_pred;
  Grid2D mean_target;
};

SsimTerms ssim_terms(const Grid2D& a, const Grid2D& b, const GaussianWindow& w, bool with_grad) {
  require_same_shape(a, b, "ssim");
  const int h = a.height(), wd = a.width();
  Grid2D mu_a = window_filter(a, w);
  Grid2D mu_b = window_filter(b, w);
  Grid2D aa(h, wd), bb(h, wd), ab(h, wd);
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const Grid2D e_aa = window_filter(aa, w);
  const Grid2D e_bb = window_filter(bb, w);
  const Grid2D e_ab = window_filter(ab, w);

  SsimTerms t{Grid2D(h, wd), Grid2D(h, wd), Grid2D(h, wd), Grid2D(h, wd),
              std::move(mu_a), std::move(mu_b)};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ma = t.mean_pred[i], mb = t.mean_target[i];
    const double raw_var_a = e_aa[i] - ma * ma;
    const double var_a = std::max(0.0, raw_var_a);
    const double var_b = std::max(0.0, e_bb[i] - mb * mb);
    const double cov = e_ab[i] - ma * mb;
    const double n1 = 2.0 * ma * mb + kSsimC1;
    const double n2 = 2.0 * cov + kSsimC2;
    const double d1 = ma * ma + mb * mb + kSsimC1;
    const double d2 = var_a + var_b + kSsimC2;
    const double s = (n1 * n2) / (d1 * d2);
    t.map[i] = s;
    if (with_grad) {
      t.d_mean[i] = (2.0 * mb * n2) / (d1 * d2) - s * 2.0 * ma / d1;
      t.d_var[i] = raw_var_a < 0.0 ? 0.0 : -s / d2;
      t.d_cov[i] = (2.0 * n1) / (d1 * d2);
    }
  }
  return t;
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {ce, ssim, iou}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("loss weights must be finite and non-negative");
    }
  }
}

LossOut ce_loss(const Grid2D& pred, const Grid2D& target) {
  require_same_shape(pred, target, "ce_loss");
  require_binary(target, "ce_loss");
  const double n = static_cast<double>(pred.size());
  LossOut out{0.0, Grid2D(pred.height(), pred.width())};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double raw = pred[i];
    const double p = std::clamp(raw, kProbEpsilon, 1.0 - kProbEpsilon);
    const double t = target[i];
    sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    const bool clamped = raw < kProbEpsilon || raw > 1.0 - kProbEpsilon;
    out.grad[i] = clamped ? 0.0 : (-t / p + (1.0 - t) / (1.0 - p)) / n;
  }
  out.value = sum / n;
  return out;
}

Grid2D ssim_map(const Grid2D& a, const Grid2D& b, const GaussianWindow& window) {
  return ssim_terms(a, b, window, false).map;
}

LossOut ssim_loss(const Grid2D& pred, const Grid2D& target, const GaussianWindow& window) {
  SsimTerms t = ssim_terms(pred, target, window, true);
  const double n = static_cast<double>(pred.size());
  double sum = 0.0;
  for (double v : t.map.values()) sum += v;

  // mean_p = F p, var_p = F p^2 - mean_p^2, cov = F (p t) - mean_p mean_t.
  // Collect the coefficient of each filtered quantity, then apply F^T.
  const int h = pred.height(), w = pred.width();
  Grid2D coef_p(h, w), coef_pp(h, w), coef_pt(h, w);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double ma = t.mean_pred[i], mb = t.mean_target[i];
    coef_p[i] = -(t.d_mean[i] - 2.0 * ma * t.d_var[i] - mb * t.d_cov[i]) / n;
    coef_pp[i] = -t.d_var[i] / n;
    coef_pt[i] = -t.d_cov[i] / n;
  }
  const Grid2D g_p = window_filter_transpose(coef_p, window);
  const Grid2D g_pp = window_filter_transpose(coef_pp, window);
  const Grid2D g_pt = window_filter_transpose(coef_pt, window);

  LossOut out{1.0 - sum / n, Grid2D(h, w)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.grad[i] = g_p[i] + 2.0 * pred[i] * g_pp[i] + target[i] * g_pt[i];
  }
  return out;
}

LossOut iou_loss(const Grid2D& pred, const Grid2D& target) {
  require_same_shape(pred, target, "iou_loss");
  double inter = 0.0, uni = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double pt = pred[i] * target[i];
    inter += pt;
    uni += pred[i] + target[i] - pt;
  }
  const double denom = uni + kIouEpsilon;
  LossOut out{1.0 - inter / denom, Grid2D(pred.height(), pred.width())};
  const double inv2 = 1.0 / (denom * denom);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double t = target[i];
    out.grad[i] = -(t * denom - inter * (1.0 - t)) * inv2;
  }
  return out;
}

LossOut total_loss(const Grid2D& pred, const Grid2D& target, const LossWeights& weights,
                   const GaussianWindow& window) {
  weights.validate();
  require_same_shape(pred, target, "total_loss");
  LossOut out{0.0, Grid2D(pred.height(), pred.width())};
  if (weights.ce != 0.0) {
    const LossOut ce = ce_loss(pred, target);
    out.value += weights.ce * ce.value;
    add_scaled(out.grad, ce.grad, weights.ce);
  }
  if (weights.ssim != 0.0) {
    const LossOut ss = ssim_loss(pred, target, window);
    out.value += weights.ssim * ss.value;
    add_scaled(out.grad, ss.grad, weights.ssim);
  }
  if (weights.iou != 0.0) {
    const LossOut io = iou_loss(pred, target);
    out.value += weights.iou * io.value;
    add_scaled(out.grad, io.grad, weights.iou);
  }
  return out;
}

MultiLossOut total_loss(std::span<const Grid2D> preds, std::span<const Grid2D> targets,
                        const LossWeights& weights, const GaussianWindow& window) {
  if (preds.size() != targets.size() || preds.empty()) {
    throw DimensionError("total_loss: need the same non-zero number of prediction and target channels");
  }
  const double k = static_cast<double>(preds.size());
  MultiLossOut out;
  out.grads.reserve(preds.size());
  for (std::size_t c = 0; c < preds.size(); ++c) {
    LossOut l = total_loss(preds[c], targets[c], weights, window);
    out.value += l.value / k;
    for (auto& g : l.grad.values()) g /= k;
    out.grads.push_back(std::move(l.grad));
  }
  return out;
}

Grid2D toy_predict(std::span<const Grid2D> features, std::span<const double> params) {
  if (features.empty() || params.size() != features.size() + 1) {
    throw InvalidArgument("toy_predict: need d >= 1 features and d + 1 parameters");
  }
  const Grid2D& first = features.front();
  Grid2D prob(first.height(), first.width());
  const double bias = params.back();
  for (std::size_t i = 0; i < prob.size(); ++i) {
    double z = bias;
    for (std::size_t d = 0; d < features.size(); ++d) z += params[d] * features[d][i];
    prob[i] = 1.0 / (1.0 + std::exp(-z));
  }
  return prob;
}

ToyFit fit_toy_segmenter(std::span<const Grid2D> features, const Grid2D& target,
                         const LossWeights& weights, int steps, double lr) {
  if (features.empty()) throw InvalidArgument("fit_toy_segmenter: need at least one feature");
  if (steps < 0) throw InvalidArgument("fit_toy_segmenter: steps must be >= 0");
  for (const Grid2D& f : features) {
    require_same_shape(f, target, "fit_toy_segmenter");
    for (double v : f.values()) {
      if (!std::isfinite(v)) throw InvalidArgument("fit_toy_segmenter: non-finite feature");
    }
  }
  const std::size_t d = features.size();
  ToyFit fit{std::vector<double>(d + 1, 0.0), {}};
  fit.loss_history.reserve(static_cast<std::size_t>(steps) + 1);

  for (int step = 0;; ++step) {
    const Grid2D prob = toy_predict(features, fit.params);
    const LossOut loss = total_loss(prob, target, weights);
    fit.loss_history.push_back(loss.value);
    if (step == steps) break;

    // dL/dz = dL/dp * p (1 - p)
    std::vector<double> grad(d + 1, 0.0);
    for (std::size_t i = 0; i < prob.size(); ++i) {
      const double dz = loss.grad[i] * prob[i] * (1.0 - prob[i]);
      for (std::size_t k = 0; k < d; ++k) grad[k] += dz * features[k][i];
      grad[d] += dz;
    }
    for (std::size_t k = 0; k <= d; ++k) fit.params[k] -= lr * grad[k];
  }
  return fit;
}

}  // namespace vostk
