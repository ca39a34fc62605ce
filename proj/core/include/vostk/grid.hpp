// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vostk/error.hpp"

namespace vostk {

/// Dense row-major H x W grid. Height and width are always >= 1.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() : Grid(1, 1) {}
  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
  }
  Grid(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
      throw DimensionError("grid data length " + std::to_string(data_.size()) +
                           " does not match " + std::to_string(height) + "x" +
                           std::to_string(width));
    }
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::span<T> row(int r) noexcept { return {data_.data() + index(r, 0), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int r) const noexcept {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(width_)};
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Grid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.data_ == b.data_;
  }

 private:
  static void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
      throw DimensionError("grid dimensions must be >= 1, got " + std::to_string(height) + "x" +
                           std::to_string(width));
    }
  }
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c);
  }

  int height_;
  int width_;
  std::vector<T> data_;
};

/// Real-valued map: probabilities, targets, local statistics.
using Grid2D = Grid<double>;
/// Per-pixel object id, 0 = background.
using LabelMask = Grid<std::uint8_t>;
/// 0/1 pixel set.
using BinaryMask = Grid<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.height()) +
                         "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
                         "x" + std::to_string(b.width()));
  }
}

/// Pixels of `labels` equal to `object_id`.
BinaryMask indicator(const LabelMask& labels, std::uint8_t object_id);
/// Pixels of `prob` strictly above `threshold`.
BinaryMask threshold(const Grid2D& prob, double threshold = 0.5);
Grid2D to_real(const BinaryMask& mask);
std::size_t count_nonzero(const BinaryMask& mask);
/// Largest label value present; 0 for an all-background mask.
std::uint8_t max_label(const LabelMask& labels);

}  // namespace vostk
