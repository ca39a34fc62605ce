// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vostk/grid.hpp"

namespace vostk {

/// Region similarity |a & b| / |a | b|; 1 when both are empty.
double jaccard(const BinaryMask& pred, const BinaryMask& gt);

/// Object pixels with a 4-neighbour outside the object or on the frame edge.
BinaryMask boundary(const BinaryMask& mask);

/// ceil(0.008 * image diagonal).
int default_contour_tolerance(int height, int width);

/// Boundary F-measure. A boundary pixel of one mask is matched when a
/// boundary pixel of the other lies within a disk of radius `tolerance_px`.
/// Both empty -> 1, exactly one empty -> 0.
double contour_f(const BinaryMask& pred, const BinaryMask& gt,
                 std::optional<int> tolerance_px = std::nullopt);

struct FrameScore {
  int frame = 0;  // 1-based
  double j = 0.0;
  double f = 0.0;
};

struct ObjectScore {
  std::uint8_t object_id = 0;
  std::vector<FrameScore> frames;  // frames where the object is absent from both masks are skipped
  double mean_j = 1.0;
  double mean_f = 1.0;
};

struct SequenceScore {
  std::string name;
  std::vector<ObjectScore> objects;
  double mean_j = 1.0;
  double mean_f = 1.0;
  double mean_jf() const noexcept { return 0.5 * (mean_j + mean_f); }
};

/// Sequence means average the objects of the sequence; corpus means average
/// every object of every sequence.
struct EvalReport {
  std::vector<SequenceScore> sequences;
  double mean_j = 1.0;
  double mean_f = 1.0;
  double mean_jf() const noexcept { return 0.5 * (mean_j + mean_f); }
};

/// Scores one sequence. Object ids are those present in any ground-truth
/// frame. Throws DimensionError on length or size mismatch.
SequenceScore evaluate_sequence(std::span<const LabelMask> pred, std::span<const LabelMask> gt,
                                std::string name = {});

EvalReport aggregate(std::vector<SequenceScore> sequences);

EvalReport evaluate(std::span<const LabelMask> pred, std::span<const LabelMask> gt);

/// `sequence,object,frame,J,F` rows followed by a `#`-prefixed summary with
/// corpus means at four decimals.
void write_report(std::ostream& out, const EvalReport& report);
void write_summary(std::ostream& out, const EvalReport& report);

}  // namespace vostk
