// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/bbox.hpp"

#include <algorithm>
#include <cmath>

namespace vostk {
namespace {

template <typename T, typename Pred>
std::optional<BBox> tight_box(const Grid<T>& g, Pred&& inside) {
  int top = g.height(), bottom = -1, left = g.width(), right = -1;
  for (int r = 0; r < g.height(); ++r) {
    const auto row = g.row(r);
    int first = -1, last = -1;
    for (int c = 0; c < g.width(); ++c) {
      if (inside(row[c])) {
        if (first < 0) first = c;
        last = c;
      }
    }
    if (first < 0) continue;
    top = std::min(top, r);
    bottom = r;
    left = std::min(left, first);
    right = std::max(right, last);
  }
  if (bottom < 0) return std::nullopt;
  return BBox{static_cast<double>(left), static_cast<double>(top),
              static_cast<double>(right - left + 1), static_cast<double>(bottom - top + 1)};
}

}  // namespace

bool BBox::valid() const noexcept {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
         w >= 0.0 && h >= 0.0;
}

int rect_gap(const PixelRect& a, const PixelRect& b) noexcept {
  const int gx = std::max({0, a.col0 - b.col1, b.col0 - a.col1});
  const int gy = std::max({0, a.row0 - b.row1, b.row0 - a.row1});
  return std::max(gx, gy);
}

PixelRect to_rect(const BBox& b) noexcept {
  return {static_cast<int>(std::floor(b.y)), static_cast<int>(std::ceil(b.y + b.h)),
          static_cast<int>(std::floor(b.x)), static_cast<int>(std::ceil(b.x + b.w))};
}

std::optional<BBox> bbox_from_mask(const LabelMask& labels, std::uint8_t object_id) {
  return tight_box(labels, [object_id](std::uint8_t v) { return v == object_id; });
}

std::optional<BBox> bbox_from_mask(const Grid2D& prob, double threshold) {
  return tight_box(prob, [threshold](double v) { return v > threshold; });
}

std::optional<BBox> bbox_from_binary(const BinaryMask& mask) {
  return tight_box(mask, [](std::uint8_t v) { return v != 0; });
}

}  // namespace vostk
