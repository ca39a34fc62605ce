// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "vostk/grid.hpp"

namespace vostk {

/// Square correlation window. Gaussian windows are built normalized and
/// separable; from_weights() accepts arbitrary (possibly unnormalized)
/// weights and always takes the dense 2-D path.
class GaussianWindow {
 public:
  /// Normalized Gaussian, weights sum to 1. Throws InvalidArgument for an
  /// even or non-positive size or a non-positive sigma.
  GaussianWindow(int size = 11, double sigma = 1.5);

  /// Raw size x size row-major weights, no normalization check.
  static GaussianWindow from_weights(int size, std::vector<double> weights);

  int size() const noexcept { return size_; }
  int radius() const noexcept { return size_ / 2; }
  double sigma() const noexcept { return sigma_; }
  double weight(int row, int col) const noexcept { return weights_[row * size_ + col]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// 1-D profile when the window is an outer product of it with itself.
  const std::optional<std::vector<double>>& profile() const noexcept { return profile_; }

 private:
  GaussianWindow(int size, double sigma, std::vector<double> weights,
                 std::optional<std::vector<double>> profile);

  int size_;
  double sigma_;
  std::vector<double> weights_;
  std::optional<std::vector<double>> profile_;
};

struct Moments {
  Grid2D mean;
  Grid2D var;
};

/// Maps an out-of-range index onto [0, n) by half-sample symmetric
/// reflection (-1 -> 0, n -> n-1), folding repeatedly for wide windows.
int mirror_index(int i, int n) noexcept;

/// out(y,x) = sum_{dy,dx} w(dy,dx) * g(mirror(y+dy), mirror(x+dx)).
Grid2D window_filter(const Grid2D& g, const GaussianWindow& w);
/// Adjoint of window_filter: <window_filter(a), b> == <a, window_filter_transpose(b)>.
Grid2D window_filter_transpose(const Grid2D& g, const GaussianWindow& w);

/// Local weighted mean and variance, var = E[x^2] - E[x]^2 clamped at 0.
Moments windowed_moments(const Grid2D& g, const GaussianWindow& w);
/// Local weighted covariance E[ab] - E[a]E[b].
Grid2D windowed_covariance(const Grid2D& a, const Grid2D& b, const GaussianWindow& w);

}  // namespace vostk
