// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vostk/bbox.hpp"
#include "vostk/grid.hpp"
#include "vostk/pt_model.hpp"

namespace vostk {

/// Constant-velocity prediction: prev + (prev - prev2), w and h clamped to >= 1.
BBox cv_predict(const BBox& prev, const BBox& prev2);

/// Hard rectangular gate: 1 inside `rect`, 0 elsewhere.
class AttentionMap {
 public:
  AttentionMap(int height, int width, PixelRect rect);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  const PixelRect& rect() const noexcept { return rect_; }
  double at(int r, int c) const noexcept { return rect_.contains(r, c) ? 1.0 : 0.0; }
  Grid2D to_grid() const;

 private:
  int height_;
  int width_;
  PixelRect rect_;
};

/// Gate for box `b` grown by margin_frac * w on the left and right and
/// margin_frac * h on top and bottom, rounded outward to whole pixels and
/// clipped to the frame. An infinite margin covers the whole frame.
AttentionMap attention_map(const BBox& b, int height, int width, double margin_frac = 0.1);

/// Elementwise product; a pixel outside the gate becomes exactly 0.
Grid2D filter_mask(const AttentionMap& am, const Grid2D& mask);
/// General {0,1} gate given as a grid. Throws InvalidArgument for other values.
Grid2D filter_mask(const Grid2D& gate, const Grid2D& mask);

enum class BoxSource { kWarmup, kCv, kPt, kFallback };
std::string_view to_string(BoxSource s) noexcept;

struct TrackRecord {
  int frame = 0;  // 1-based
  std::uint8_t object_id = 0;
  std::optional<BBox> box;  // reinitialized box after filtering; nullopt when absent
  BoxSource source = BoxSource::kWarmup;
  std::optional<AttentionMap> gate;  // set for cv/pt/fallback frames
};

struct FilterConfig {
  double margin_frac = 0.1;
  double threshold = 0.5;
};

/// Either constant velocity (no model) or the parametric tracker.
struct TrackerVariant {
  const Mlp* pt_model = nullptr;

  static TrackerVariant cv() { return {}; }
  static TrackerVariant pt(const Mlp& model) { return {&model}; }
  bool is_pt() const noexcept { return pt_model != nullptr; }
};

/// Compose per-object probabilities into a label map. Background scores
/// 1 - max_k p_k and wins ties; among objects the lowest id wins ties.
/// Channel k holds object id k + 1.
LabelMask compose_labels(std::span<const Grid2D> channels);

/// Streaming form of the prediction filter. Holds only the last two boxes
/// per object, so memory does not depend on sequence length.
///
/// Per object, a frame is a warm-up frame (passed through unchanged, box
/// taken from the mask) until two consecutive boxes are known. After that
/// the box is predicted with the variant, turned into a gate, the channel
/// is gated, and the box is re-read from the gated channel. A gated channel
/// with no pixel above threshold falls back to the unfiltered channel for
/// that frame and clears the motion history, so the following two frames
/// warm up again.
class SequenceFilter {
 public:
  SequenceFilter(TrackerVariant variant, FilterConfig config = {});

  /// Filters one frame in place (channel k = object id k + 1) and returns
  /// one record per object. Throws DimensionError if the frame size or
  /// object count differs from the first frame.
  std::vector<TrackRecord> push(std::vector<Grid2D>& channels);

  int frames_seen() const noexcept { return frame_; }

 private:
  struct ObjectState {
    std::optional<BBox> prev;
    std::optional<BBox> prev2;
  };

  TrackerVariant variant_;
  FilterConfig config_;
  int frame_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<ObjectState> objects_;
};

struct FilterResult {
  std::vector<std::vector<Grid2D>> filtered;  // [frame][object]
  std::vector<LabelMask> labels;              // [frame]
  std::vector<TrackRecord> track;             // frame-major, then object
};

/// Runs the filter over a whole sequence of per-object probability maps.
/// Throws InvalidArgument for an empty sequence.
FilterResult run_filter(std::span<const std::vector<Grid2D>> predicted, TrackerVariant variant,
                        const FilterConfig& config = {});

/// CSV header `frame,object_id,x,y,w,h,source`; absent boxes leave x..h empty.
void write_track_csv_header(std::ostream& out);
void write_track_csv_rows(std::ostream& out, std::span<const TrackRecord> rows);

}  // namespace vostk
