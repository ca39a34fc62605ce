// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/grid.hpp"

#include <algorithm>

namespace vostk {

BinaryMask indicator(const LabelMask& labels, std::uint8_t object_id) {
  BinaryMask out(labels.height(), labels.width());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == object_id ? 1 : 0;
  return out;
}

BinaryMask threshold(const Grid2D& prob, double threshold) {
  BinaryMask out(prob.height(), prob.width());
  for (std::size_t i = 0; i < prob.size(); ++i) out[i] = prob[i] > threshold ? 1 : 0;
  return out;
}

Grid2D to_real(const BinaryMask& mask) {
  Grid2D out(mask.height(), mask.width());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1.0 : 0.0;
  return out;
}

std::size_t count_nonzero(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(), [](auto v) { return v != 0; }));
}

std::uint8_t max_label(const LabelMask& labels) {
  return *std::max_element(labels.values().begin(), labels.values().end());
}

}  // namespace vostk
