// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "vostk/losses.hpp"
#include "vostk/pt_model.hpp"
#include "vostk/rng.hpp"

namespace vostk {
namespace {

// Gradients far below the largest entry are dominated by rounding in the
// difference quotient; they are compared on the scale of the largest one.
constexpr double kFloorFraction = 1e-3;

struct Instance {
  Grid2D pred;
  Grid2D target;
};

Instance random_instance(SplitMix64& rng, int side) {
  Instance in{Grid2D(side, side), Grid2D(side, side)};
  // Blocky targets so the SSIM windows see structure, not only noise.
  const int cell = std::max(2, side / 4);
  std::vector<double> cells(static_cast<std::size_t>((side / cell + 1) * (side / cell + 1)));
  for (auto& c : cells) c = rng.bernoulli(0.5) ? 1.0 : 0.0;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      in.target(r, c) = cells[static_cast<std::size_t>((r / cell) * (side / cell + 1) + c / cell)];
      in.pred(r, c) = rng.uniform(0.02, 0.98);
    }
  }
  return in;
}

double check_loss(const std::function<LossOut(const Grid2D&, const Grid2D&)>& loss,
                  const Instance& in, double h) {
  const LossOut analytic = loss(in.pred, in.target);
  Grid2D p = in.pred;
  std::vector<double> numeric(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double up = loss(p, in.target).value;
    p[i] = orig - h;
    const double down = loss(p, in.target).value;
    p[i] = orig;
    numeric[i] = (up - down) / (2.0 * h);
  }
  double scale = 0.0;
  for (double n : numeric) scale = std::max(scale, std::abs(n));
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    worst = std::max(worst, relative_error(analytic.grad[i], numeric[i], kFloorFraction * scale));
  }
  return worst;
}

Mlp random_mlp(SplitMix64& rng) {
  Mlp m = make_pt_model(rng());
  for (auto& layer : m.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (auto& w : layer.weight) {
      if (w == 0.0) w = rng.uniform(-bound, bound);
    }
    for (auto& b : layer.bias) b = rng.uniform(-0.1, 0.1);
  }
  return m;
}

double check_mlp(SplitMix64& rng, double h) {
  Mlp model = random_mlp(rng);
  std::vector<double> input(4), upstream(4);
  for (auto& v : input) v = rng.uniform(-1.0, 1.0);
  for (auto& v : upstream) v = rng.uniform(-1.0, 1.0);
  MlpCache cache;
  mlp_forward(model, input, &cache);
  const MlpGrad grad = mlp_backward(model, cache, upstream);

  auto objective = [&]() {
    const auto out = mlp_forward(model, input);
    double s = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) s += out[k] * upstream[k];
    return s;
  };
  std::vector<double> analytic, numeric;
  auto probe = [&](std::vector<double>& params, const std::vector<double>& g) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double orig = params[i];
      params[i] = orig + h;
      const double up = objective();
      params[i] = orig - h;
      const double down = objective();
      params[i] = orig;
      numeric.push_back((up - down) / (2.0 * h));
      analytic.push_back(g[i]);
    }
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    probe(model.layers[l].weight, grad[l].weight);
    probe(model.layers[l].bias, grad[l].bias);
  }
  double scale = 0.0;
  for (double n : numeric) scale = std::max(scale, std::abs(n));
  double worst = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    worst = std::max(worst, relative_error(analytic[i], numeric[i], kFloorFraction * scale));
  }
  return worst;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  if (denom == 0.0) return 0.0;
  return std::abs(analytic - numeric) / denom;
}

std::vector<GradCheckItem> run_gradcheck(const GradCheckConfig& config) {
  SplitMix64 rng(config.seed);
  const GaussianWindow window;
  GradCheckItem ce{"ce_loss", 0.0, 1e-4, 0};
  GradCheckItem iou{"iou_loss", 0.0, 1e-4, 0};
  GradCheckItem ssim{"ssim_loss", 0.0, 1e-3, 0};
  GradCheckItem total{"total_loss", 0.0, 1e-3, 0};
  GradCheckItem gelu_item{"gelu", 0.0, 1e-4, 0};
  GradCheckItem mlp{"mlp_backward", 0.0, 1e-4, 0};

  auto bump = [](GradCheckItem& item, double err) {
    item.max_rel_error = std::max(item.max_rel_error, err);
    ++item.instances;
  };
  for (int s = 0; s < config.seeds; ++s) {
    for (int side : config.sizes) {
      const Instance in = random_instance(rng, side);
      bump(ce, check_loss([](const Grid2D& p, const Grid2D& t) { return ce_loss(p, t); }, in, config.step));
      bump(iou, check_loss([](const Grid2D& p, const Grid2D& t) { return iou_loss(p, t); }, in, config.step));
      bump(ssim, check_loss([&](const Grid2D& p, const Grid2D& t) { return ssim_loss(p, t, window); },
                            in, config.step));
      bump(total, check_loss([&](const Grid2D& p, const Grid2D& t) { return total_loss(p, t, {}, window); },
                             in, config.step));
    }
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double x = rng.uniform(-6.0, 6.0);
      const double numeric = (gelu(x + config.step) - gelu(x - config.step)) / (2.0 * config.step);
      worst = std::max(worst, relative_error(gelu_grad(x), numeric, kFloorFraction));
    }
    bump(gelu_item, worst);
    bump(mlp, check_mlp(rng, config.step));
  }
  return {ce, iou, ssim, total, gelu_item, mlp};
}

}  // namespace vostk
