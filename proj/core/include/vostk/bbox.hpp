// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "vostk/grid.hpp"

namespace vostk {

/// Frame-to-frame box delta (dx, dy, dw, dh), px per frame.
struct Motion {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;

  friend bool operator==(const Motion&, const Motion&) = default;
};

/// Axis-aligned box in continuous pixel units: x is the left column edge,
/// y the top row edge. A pixel (r, c) covers [c, c+1) x [r, r+1).
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const noexcept { return w * h; }
  bool valid() const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline Motion operator-(const BBox& a, const BBox& b) noexcept {
  return {a.x - b.x, a.y - b.y, a.w - b.w, a.h - b.h};
}
inline BBox operator+(const BBox& b, const Motion& m) noexcept {
  return {b.x + m.dx, b.y + m.dy, b.w + m.dw, b.h + m.dh};
}
inline Motion operator*(const Motion& m, double s) noexcept {
  return {m.dx * s, m.dy * s, m.dw * s, m.dh * s};
}

/// Half-open integer pixel rectangle [row0, row1) x [col0, col1).
struct PixelRect {
  int row0 = 0;
  int row1 = 0;
  int col0 = 0;
  int col1 = 0;

  bool empty() const noexcept { return row0 >= row1 || col0 >= col1; }
  long area() const noexcept {
    return empty() ? 0 : static_cast<long>(row1 - row0) * (col1 - col0);
  }
  bool contains(int r, int c) const noexcept { return r >= row0 && r < row1 && c >= col0 && c < col1; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Chebyshev gap: number of empty rows or columns separating two rects,
/// whichever is larger; 0 when they touch or overlap.
int rect_gap(const PixelRect& a, const PixelRect& b) noexcept;
/// Integer box (x, y, w, h) as a pixel rect; non-integer edges are rounded outward.
PixelRect to_rect(const BBox& b) noexcept;

/// Tightest box around the pixels labelled `object_id`; nullopt if none.
std::optional<BBox> bbox_from_mask(const LabelMask& labels, std::uint8_t object_id);
/// Tightest box around the pixels with probability > threshold.
std::optional<BBox> bbox_from_mask(const Grid2D& prob, double threshold = 0.5);
std::optional<BBox> bbox_from_binary(const BinaryMask& mask);

}  // namespace vostk
