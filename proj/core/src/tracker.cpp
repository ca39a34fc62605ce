// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace vostk {
namespace {

int clip_floor(double v, int hi) {
  if (std::isnan(v)) return 0;
  return static_cast<int>(std::clamp(std::floor(v), 0.0, static_cast<double>(hi)));
}

int clip_ceil(double v, int hi) {
  if (std::isnan(v)) return hi;
  return static_cast<int>(std::clamp(std::ceil(v), 0.0, static_cast<double>(hi)));
}

bool any_above(const Grid2D& g, const PixelRect& rect, double threshold) {
  for (int r = rect.row0; r < rect.row1; ++r) {
    const auto row = g.row(r);
    for (int c = rect.col0; c < rect.col1; ++c) {
      if (row[c] > threshold) return true;
    }
  }
  return false;
}

// Tight box of above-threshold pixels restricted to the gate rectangle.
std::optional<BBox> box_in_rect(const Grid2D& g, const PixelRect& rect, double threshold) {
  int top = -1, bottom = -1, left = rect.col1, right = -1;
  for (int r = rect.row0; r < rect.row1; ++r) {
    const auto row = g.row(r);
    for (int c = rect.col0; c < rect.col1; ++c) {
      if (row[c] > threshold) {
        if (top < 0) top = r;
        bottom = r;
        left = std::min(left, c);
        right = std::max(right, c);
      }
    }
  }
  if (top < 0) return std::nullopt;
  return BBox{static_cast<double>(left), static_cast<double>(top),
              static_cast<double>(right - left + 1), static_cast<double>(bottom - top + 1)};
}

void gate_in_place(Grid2D& g, const PixelRect& rect) {
  for (int r = 0; r < g.height(); ++r) {
    auto row = g.row(r);
    if (r < rect.row0 || r >= rect.row1) {
      std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    std::fill(row.begin(), row.begin() + rect.col0, 0.0);
    std::fill(row.begin() + rect.col1, row.end(), 0.0);
  }
}

}  // namespace

BBox cv_predict(const BBox& prev, const BBox& prev2) {
  BBox next = prev + (prev - prev2);
  next.w = std::max(next.w, 1.0);
  next.h = std::max(next.h, 1.0);
  return next;
}

AttentionMap::AttentionMap(int height, int width, PixelRect rect)
    : height_(height), width_(width), rect_(rect) {
  if (height < 1 || width < 1) throw DimensionError("attention map dimensions must be >= 1");
  if (rect_.empty()) rect_ = {0, 0, 0, 0};
}

Grid2D AttentionMap::to_grid() const {
  Grid2D g(height_, width_);
  for (int r = rect_.row0; r < rect_.row1; ++r) {
    for (int c = rect_.col0; c < rect_.col1; ++c) g(r, c) = 1.0;
  }
  return g;
}

AttentionMap attention_map(const BBox& b, int height, int width, double margin_frac) {
  if (!(margin_frac >= 0.0)) throw InvalidArgument("attention_map: margin_frac must be >= 0");
  // 0 * inf is NaN; a zero-size side gets no margin.
  const double mx = b.w > 0.0 ? margin_frac * b.w : 0.0;
  const double my = b.h > 0.0 ? margin_frac * b.h : 0.0;
  PixelRect rect{clip_floor(b.y - my, height), clip_ceil(b.y + b.h + my, height),
                 clip_floor(b.x - mx, width), clip_ceil(b.x + b.w + mx, width)};
  return AttentionMap(height, width, rect);
}

Grid2D filter_mask(const AttentionMap& am, const Grid2D& mask) {
  if (am.height() != mask.height() || am.width() != mask.width()) {
    throw DimensionError("filter_mask: attention map and mask differ in shape");
  }
  Grid2D out = mask;
  gate_in_place(out, am.rect());
  return out;
}

Grid2D filter_mask(const Grid2D& gate, const Grid2D& mask) {
  require_same_shape(gate, mask, "filter_mask");
  Grid2D out(mask.height(), mask.width());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (gate[i] != 0.0 && gate[i] != 1.0) throw InvalidArgument("filter_mask: gate must be 0/1");
    out[i] = gate[i] == 1.0 ? mask[i] : 0.0;
  }
  return out;
}

std::string_view to_string(BoxSource s) noexcept {
  switch (s) {
    case BoxSource::kWarmup: return "warmup";
    case BoxSource::kCv: return "cv";
    case BoxSource::kPt: return "pt";
    case BoxSource::kFallback: return "fallback";
  }
  return "unknown";
}

LabelMask compose_labels(std::span<const Grid2D> channels) {
  if (channels.empty()) throw InvalidArgument("compose_labels: no channels");
  if (channels.size() > 255) throw InvalidArgument("compose_labels: at most 255 objects");
  const Grid2D& first = channels.front();
  for (const auto& c : channels) require_same_shape(first, c, "compose_labels");
  LabelMask labels(first.height(), first.width());
  for (std::size_t i = 0; i < first.size(); ++i) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
      if (channels[k][i] > best) {
        best = channels[k][i];
        best_k = k;
      }
    }
    labels[i] = best > 1.0 - best ? static_cast<std::uint8_t>(best_k + 1) : 0;
  }
  return labels;
}

SequenceFilter::SequenceFilter(TrackerVariant variant, FilterConfig config)
    : variant_(variant), config_(config) {
  if (!(config_.margin_frac >= 0.0)) throw InvalidArgument("margin_frac must be >= 0");
}

std::vector<TrackRecord> SequenceFilter::push(std::vector<Grid2D>& channels) {
  if (channels.empty()) throw DimensionError("frame has no object channels");
  const int h = channels.front().height(), w = channels.front().width();
  if (frame_ == 0) {
    height_ = h;
    width_ = w;
    objects_.assign(channels.size(), {});
  }
  if (channels.size() != objects_.size()) {
    throw DimensionError("object count changed from " + std::to_string(objects_.size()) + " to " +
                         std::to_string(channels.size()) + " at frame " + std::to_string(frame_ + 1));
  }
  for (const auto& c : channels) {
    if (c.height() != height_ || c.width() != width_) {
      throw DimensionError("frame size drift at frame " + std::to_string(frame_ + 1));
    }
  }
  ++frame_;

  const PixelRect full{0, height_, 0, width_};
  std::vector<TrackRecord> records;
  records.reserve(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    ObjectState& st = objects_[k];
    Grid2D& channel = channels[k];
    TrackRecord rec;
    rec.frame = frame_;
    rec.object_id = static_cast<std::uint8_t>(k + 1);

    if (frame_ < 3 || !st.prev || !st.prev2) {
      rec.source = BoxSource::kWarmup;
      rec.box = box_in_rect(channel, full, config_.threshold);
      st.prev2 = st.prev;
      st.prev = rec.box;
      records.push_back(std::move(rec));
      continue;
    }

    const BBox predicted =
        variant_.is_pt() ? pt_predict(*variant_.pt_model, *st.prev, *st.prev2, height_, width_)
                         : cv_predict(*st.prev, *st.prev2);
    AttentionMap gate = attention_map(predicted, height_, width_, config_.margin_frac);
    if (any_above(channel, gate.rect(), config_.threshold)) {
      gate_in_place(channel, gate.rect());
      rec.box = box_in_rect(channel, gate.rect(), config_.threshold);
      rec.source = variant_.is_pt() ? BoxSource::kPt : BoxSource::kCv;
      st.prev2 = st.prev;
      st.prev = rec.box;
    } else {
      rec.box = box_in_rect(channel, full, config_.threshold);
      rec.source = BoxSource::kFallback;
      st.prev.reset();
      st.prev2.reset();
    }
    rec.gate = gate;
    records.push_back(std::move(rec));
  }
  return records;
}

FilterResult run_filter(std::span<const std::vector<Grid2D>> predicted, TrackerVariant variant,
                        const FilterConfig& config) {
  if (predicted.empty()) throw InvalidArgument("run_filter: empty sequence");
  SequenceFilter filter(variant, config);
  FilterResult result;
  result.filtered.reserve(predicted.size());
  result.labels.reserve(predicted.size());
  for (const auto& frame : predicted) {
    std::vector<Grid2D> channels = frame;
    auto records = filter.push(channels);
    for (auto& r : records) result.track.push_back(std::move(r));
    result.labels.push_back(compose_labels(channels));
    result.filtered.push_back(std::move(channels));
  }
  return result;
}

void write_track_csv_header(std::ostream& out) { out << "frame,object_id,x,y,w,h,source\n"; }

void write_track_csv_rows(std::ostream& out, std::span<const TrackRecord> rows) {
  for (const auto& r : rows) {
    out << r.frame << ',' << static_cast<int>(r.object_id) << ',';
    if (r.box) {
      out << r.box->x << ',' << r.box->y << ',' << r.box->w << ',' << r.box->h;
    } else {
      out << ",,,";
    }
    out << ',' << to_string(r.source) << '\n';
  }
}

}  // namespace vostk
