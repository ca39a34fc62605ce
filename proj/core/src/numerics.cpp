// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vostk {
namespace {

void check_size(int size) {
  if (size < 1 || size % 2 == 0) {
    throw InvalidArgument("window size must be odd and positive, got " + std::to_string(size));
  }
}

// Precomputed mirrored source index for every (output position, tap).
std::vector<int> tap_table(int n, int radius) {
  const int taps = 2 * radius + 1;
  std::vector<int> table(static_cast<std::size_t>(n) * taps);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < taps; ++k) table[i * taps + k] = mirror_index(i + k - radius, n);
  }
  return table;
}

// Separable pass along rows (horizontal=true) or columns.
Grid2D pass_1d(const Grid2D& g, const std::vector<double>& profile, bool horizontal) {
  const int h = g.height(), w = g.width();
  const int radius = static_cast<int>(profile.size()) / 2;
  const int taps = static_cast<int>(profile.size());
  Grid2D out(h, w);
  if (horizontal) {
    const auto table = tap_table(w, radius);
    for (int y = 0; y < h; ++y) {
      const auto src = g.row(y);
      auto dst = out.row(y);
      for (int x = 0; x < w; ++x) {
        const int* idx = &table[x * taps];
        double acc = 0.0;
        for (int k = 0; k < taps; ++k) acc += profile[k] * src[idx[k]];
        dst[x] = acc;
      }
    }
  } else {
    const auto table = tap_table(h, radius);
    for (int y = 0; y < h; ++y) {
      const int* idx = &table[y * taps];
      auto dst = out.row(y);
      for (int k = 0; k < taps; ++k) {
        const auto src = g.row(idx[k]);
        const double wk = profile[k];
        for (int x = 0; x < w; ++x) dst[x] += wk * src[x];
      }
    }
  }
  return out;
}

Grid2D pass_1d_transpose(const Grid2D& g, const std::vector<double>& profile, bool horizontal) {
  const int h = g.height(), w = g.width();
  const int radius = static_cast<int>(profile.size()) / 2;
  const int taps = static_cast<int>(profile.size());
  Grid2D out(h, w);
  if (horizontal) {
    const auto table = tap_table(w, radius);
    for (int y = 0; y < h; ++y) {
      const auto src = g.row(y);
      auto dst = out.row(y);
      for (int x = 0; x < w; ++x) {
        const int* idx = &table[x * taps];
        for (int k = 0; k < taps; ++k) dst[idx[k]] += profile[k] * src[x];
      }
    }
  } else {
    const auto table = tap_table(h, radius);
    for (int y = 0; y < h; ++y) {
      const int* idx = &table[y * taps];
      const auto src = g.row(y);
      for (int k = 0; k < taps; ++k) {
        auto dst = out.row(idx[k]);
        const double wk = profile[k];
        for (int x = 0; x < w; ++x) dst[x] += wk * src[x];
      }
    }
  }
  return out;
}

Grid2D dense_filter(const Grid2D& g, const GaussianWindow& w, bool transpose) {
  const int h = g.height(), wd = g.width();
  const int r = w.radius(), s = w.size();
  const auto rows = tap_table(h, r);
  const auto cols = tap_table(wd, r);
  Grid2D out(h, wd);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wd; ++x) {
      double acc = 0.0;
      for (int dy = 0; dy < s; ++dy) {
        const int sy = rows[y * s + dy];
        for (int dx = 0; dx < s; ++dx) {
          const int sx = cols[x * s + dx];
          if (transpose) {
            out(sy, sx) += w.weight(dy, dx) * g(y, x);
          } else {
            acc += w.weight(dy, dx) * g(sy, sx);
          }
        }
      }
      if (!transpose) out(y, x) = acc;
    }
  }
  return out;
}

Grid2D multiply(const Grid2D& a, const Grid2D& b) {
  Grid2D out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace

GaussianWindow::GaussianWindow(int size, double sigma) : size_(size), sigma_(sigma) {
  check_size(size);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("window sigma must be positive and finite");
  }
  std::vector<double> g(static_cast<std::size_t>(size));
  const int r = size / 2;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    total += g[i];
  }
  for (auto& v : g) v /= total;
  weights_.resize(static_cast<std::size_t>(size) * size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) weights_[i * size + j] = g[i] * g[j];
  }
  profile_ = std::move(g);
}

GaussianWindow::GaussianWindow(int size, double sigma, std::vector<double> weights,
                               std::optional<std::vector<double>> profile)
    : size_(size), sigma_(sigma), weights_(std::move(weights)), profile_(std::move(profile)) {}

GaussianWindow GaussianWindow::from_weights(int size, std::vector<double> weights) {
  check_size(size);
  if (weights.size() != static_cast<std::size_t>(size) * static_cast<std::size_t>(size)) {
    throw InvalidArgument("window weights must have size*size entries");
  }
  return GaussianWindow(size, 0.0, std::move(weights), std::nullopt);
}

int mirror_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

Grid2D window_filter(const Grid2D& g, const GaussianWindow& w) {
  if (const auto& p = w.profile()) return pass_1d(pass_1d(g, *p, true), *p, false);
  return dense_filter(g, w, false);
}

Grid2D window_filter_transpose(const Grid2D& g, const GaussianWindow& w) {
  if (const auto& p = w.profile()) {
    return pass_1d_transpose(pass_1d_transpose(g, *p, false), *p, true);
  }
  return dense_filter(g, w, true);
}

Moments windowed_moments(const Grid2D& g, const GaussianWindow& w) {
  Grid2D mean = window_filter(g, w);
  Grid2D var = window_filter(multiply(g, g), w);
  for (std::size_t i = 0; i < var.size(); ++i) var[i] = std::max(0.0, var[i] - mean[i] * mean[i]);
  return {std::move(mean), std::move(var)};
}

Grid2D windowed_covariance(const Grid2D& a, const Grid2D& b, const GaussianWindow& w) {
  require_same_shape(a, b, "windowed_covariance");
  const Grid2D ma = window_filter(a, w);
  const Grid2D mb = window_filter(b, w);
  Grid2D cov = window_filter(multiply(a, b), w);
  for (std::size_t i = 0; i < cov.size(); ++i) cov[i] -= ma[i] * mb[i];
  return cov;
}

}  // namespace vostk
