// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "test_util.hpp"
#include "vostk/bbox.hpp"
#include "vostk/error.hpp"
#include "vostk/metrics.hpp"
#include "vostk/tracker.hpp"

namespace vostk {
namespace {

using test::rect_mask;

Grid2D rect_channel(int h, int w, int row0, int row1, int col0, int col1, double v = 1.0) {
  Grid2D g(h, w, 0.0);
  for (int r = row0; r < row1; ++r) {
    for (int c = col0; c < col1; ++c) g(r, c) = v;
  }
  return g;
}

// One object: a 10x12 rectangle moving by (+3, +2) px per frame.
std::vector<std::vector<Grid2D>> linear_sequence(int frames, int h = 80, int w = 120) {
  std::vector<std::vector<Grid2D>> seq;
  for (int f = 0; f < frames; ++f) {
    const int r0 = 10 + 2 * f;
    const int c0 = 5 + 3 * f;
    seq.push_back({rect_channel(h, w, r0, r0 + 10, c0, c0 + 12)});
  }
  return seq;
}

TEST(BBox, FromMaskFullFrame) {
  const LabelMask m(6, 9, 1);
  const auto b = bbox_from_mask(m, 1);
  ASSERT_TRUE(b);
  EXPECT_EQ(*b, (BBox{0, 0, 9, 6}));
}

TEST(BBox, FromMaskSinglePixel) {
  LabelMask m(10, 10, 0);
  m(3, 5) = 2;
  EXPECT_EQ(*bbox_from_mask(m, 2), (BBox{5, 3, 1, 1}));
  EXPECT_FALSE(bbox_from_mask(m, 1).has_value());
}

TEST(BBox, FromSoftMaskUsesStrictThreshold) {
  Grid2D p(8, 8, 0.0);
  p(2, 2) = 0.5;
  EXPECT_FALSE(bbox_from_mask(p).has_value());
  p(4, 6) = 0.51;
  p(1, 3) = 0.9;
  EXPECT_EQ(*bbox_from_mask(p), (BBox{3, 1, 4, 4}));
}

TEST(BBox, RectHelpers) {
  EXPECT_EQ(to_rect(BBox{1.2, 2.0, 3.5, 4.0}), (PixelRect{2, 6, 1, 5}));
  EXPECT_EQ(rect_gap(PixelRect{0, 4, 0, 4}, PixelRect{0, 4, 4, 8}), 0);
  EXPECT_EQ(rect_gap(PixelRect{0, 4, 0, 4}, PixelRect{10, 12, 6, 8}), 6);
  EXPECT_EQ(rect_gap(PixelRect{0, 4, 0, 4}, PixelRect{2, 3, 2, 3}), 0);
}

TEST(CvPredict, Examples) {
  EXPECT_EQ(cv_predict({14, 12, 20, 20}, {10, 10, 20, 20}), (BBox{18, 14, 20, 20}));
  EXPECT_EQ(cv_predict({7, 8, 9, 10}, {7, 8, 9, 10}), (BBox{7, 8, 9, 10}));
  EXPECT_EQ(cv_predict({0, 0, 6, 6}, {0, 0, 10, 10}), (BBox{0, 0, 2, 2}));
  const BBox clamped = cv_predict({0, 0, 2, 3}, {0, 0, 10, 10});
  EXPECT_EQ(clamped.w, 1.0);
  EXPECT_EQ(clamped.h, 1.0);
}

TEST(AttentionMap, CountsAndRounding) {
  const auto full = attention_map({0, 0, 10, 10}, 10, 10, 0.0);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) EXPECT_EQ(full.at(r, c), 1.0);
  }
  EXPECT_EQ(attention_map({2, 2, 4, 4}, 10, 10, 0.0).rect().area(), 16);
  const auto grown = attention_map({2, 2, 4, 4}, 10, 10, 0.25);
  EXPECT_EQ(grown.rect(), (PixelRect{1, 7, 1, 7}));
  EXPECT_EQ(grown.rect().area(), 36);
  // 0.1 * 4 = 0.4 px rounds outward to a full pixel on each side.
  EXPECT_EQ(attention_map({2, 2, 4, 4}, 10, 10, 0.1).rect(), (PixelRect{1, 7, 1, 7}));
}

TEST(AttentionMap, ClippingAndDegenerateBoxes) {
  EXPECT_EQ(attention_map({-5, -5, 8, 8}, 10, 10, 0.0).rect(), (PixelRect{0, 3, 0, 3}));
  EXPECT_TRUE(attention_map({20, 20, 4, 4}, 10, 10, 0.0).rect().empty());
  const auto inf = attention_map({4, 4, 1, 1}, 10, 12, std::numeric_limits<double>::infinity());
  EXPECT_EQ(inf.rect(), (PixelRect{0, 10, 0, 12}));
  EXPECT_THROW(attention_map({0, 0, 1, 1}, 10, 10, -0.1), InvalidArgument);
}

TEST(FilterMask, IdentityAnnihilationAndGating) {
  const Grid2D m = test::random_grid(6, 8, 3);
  EXPECT_EQ(filter_mask(attention_map({0, 0, 8, 6}, 6, 8, 0.0), m), m);
  const Grid2D zero = filter_mask(AttentionMap(6, 8, PixelRect{}), m);
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
  const Grid2D left = filter_mask(AttentionMap(6, 8, PixelRect{0, 6, 0, 4}), m);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 8; ++c) EXPECT_EQ(left(r, c), c < 4 ? m(r, c) : 0.0);
  }
  EXPECT_THROW(filter_mask(AttentionMap(6, 9, PixelRect{}), m), DimensionError);
}

TEST(FilterMask, GridGateMustBeBinary) {
  const Grid2D m = test::random_grid(4, 4, 4);
  Grid2D gate(4, 4, 1.0);
  EXPECT_EQ(filter_mask(gate, m), m);
  gate(0, 0) = 0.5;
  EXPECT_THROW(filter_mask(gate, m), InvalidArgument);
}

TEST(ComposeLabels, TiesAndArgmax) {
  std::vector<Grid2D> ch{Grid2D(1, 4, 0.0), Grid2D(1, 4, 0.0)};
  ch[0](0, 0) = 0.5;  // background 0.5 ties and wins
  ch[0](0, 1) = 0.6;
  ch[1](0, 1) = 0.6;  // object tie: lowest id
  ch[1](0, 2) = 0.9;
  ch[0](0, 3) = 0.2;
  const auto labels = compose_labels(ch);
  EXPECT_EQ(labels(0, 0), 0);
  EXPECT_EQ(labels(0, 1), 1);
  EXPECT_EQ(labels(0, 2), 2);
  EXPECT_EQ(labels(0, 3), 0);
}

TEST(RunFilter, InTrackSequenceIsUnchanged) {
  const auto seq = linear_sequence(12);
  const auto result = run_filter(seq, TrackerVariant::cv());
  ASSERT_EQ(result.filtered.size(), seq.size());
  for (std::size_t f = 0; f < seq.size(); ++f) EXPECT_EQ(result.filtered[f][0], seq[f][0]);
  ASSERT_EQ(result.track.size(), 12u);
  EXPECT_EQ(result.track[0].source, BoxSource::kWarmup);
  EXPECT_EQ(result.track[1].source, BoxSource::kWarmup);
  for (std::size_t f = 2; f < 12; ++f) EXPECT_EQ(result.track[f].source, BoxSource::kCv);
  EXPECT_EQ(*result.track[5].box, (BBox{20, 20, 12, 10}));
}

TEST(RunFilter, RemovesFarBlobAndImprovesJ) {
  auto seq = linear_sequence(10);
  const auto clean = seq;
  for (std::size_t f = 2; f < seq.size(); ++f) {
    for (int r = 60; r < 70; ++r) {
      for (int c = 100; c < 110; ++c) seq[f][0](r, c) = 0.9;
    }
  }
  const auto result = run_filter(seq, TrackerVariant::cv());
  for (std::size_t f = 2; f < seq.size(); ++f) {
    EXPECT_EQ(result.filtered[f][0], clean[f][0]) << "frame " << f + 1;
    const auto gt = threshold(clean[f][0]);
    EXPECT_GT(jaccard(threshold(result.filtered[f][0]), gt), jaccard(threshold(seq[f][0]), gt));
  }
}

TEST(RunFilter, VanishingObjectFallsBackAndRecovers) {
  auto seq = linear_sequence(10);
  seq[4][0].fill(0.0);  // frame 5
  const auto result = run_filter(seq, TrackerVariant::cv());
  const auto& t = result.track;
  EXPECT_EQ(t[4].source, BoxSource::kFallback);
  EXPECT_FALSE(t[4].box.has_value());
  EXPECT_EQ(t[5].source, BoxSource::kWarmup);
  EXPECT_TRUE(t[5].box.has_value());
  EXPECT_EQ(t[6].source, BoxSource::kWarmup);
  EXPECT_EQ(t[7].source, BoxSource::kCv);
  for (std::size_t f = 0; f < seq.size(); ++f) EXPECT_EQ(result.filtered[f][0], seq[f][0]);
}

TEST(RunFilter, JumpFallsBackToUnfilteredChannel) {
  auto seq = linear_sequence(8);
  seq[5][0] = rect_channel(80, 120, 60, 70, 2, 12);
  const auto result = run_filter(seq, TrackerVariant::cv());
  EXPECT_EQ(result.track[5].source, BoxSource::kFallback);
  EXPECT_EQ(result.filtered[5][0], seq[5][0]);
  EXPECT_EQ(*result.track[5].box, (BBox{2, 60, 10, 10}));
}

TEST(RunFilter, NonExpansiveAndBoxesInsideGate) {
  auto seq = linear_sequence(15);
  SplitMix64 rng(9);
  for (auto& frame : seq) {
    for (auto& v : frame[0].values()) {
      if (rng.bernoulli(0.02)) v = rng.uniform();
    }
  }
  const auto result = run_filter(seq, TrackerVariant::cv());
  for (std::size_t f = 0; f < seq.size(); ++f) {
    for (std::size_t i = 0; i < seq[f][0].size(); ++i) EXPECT_LE(result.filtered[f][0][i], seq[f][0][i]);
  }
  for (const auto& rec : result.track) {
    if (rec.source == BoxSource::kCv && rec.box) {
      const PixelRect r = to_rect(*rec.box);
      const PixelRect g = rec.gate->rect();
      EXPECT_TRUE(r.row0 >= g.row0 && r.row1 <= g.row1 && r.col0 >= g.col0 && r.col1 <= g.col1);
    }
    if (rec.box) EXPECT_TRUE(rec.box->valid());
  }
}

TEST(RunFilter, InfiniteMarginIsIdentity) {
  auto seq = linear_sequence(8);
  seq[3][0](70, 110) = 0.8;
  seq[6][0](1, 1) = 0.95;
  FilterConfig cfg;
  cfg.margin_frac = std::numeric_limits<double>::infinity();
  const auto result = run_filter(seq, TrackerVariant::cv(), cfg);
  for (std::size_t f = 0; f < seq.size(); ++f) EXPECT_EQ(result.filtered[f], seq[f]);
}

TEST(RunFilter, ZeroModelPtIsStationaryTracker) {
  const Mlp zero;
  auto seq = linear_sequence(6);
  const auto result = run_filter(seq, TrackerVariant::pt(zero));
  // The predicted box is last frame's box: the gate sits one step behind.
  const auto& rec = result.track[2];
  EXPECT_EQ(rec.source, BoxSource::kPt);
  EXPECT_EQ(rec.gate->rect(), to_rect(BBox{8 - 1.2, 12 - 1.0, 12 + 2.4, 10 + 2.0}));
}

TEST(RunFilter, MultiObjectIndependentTracks) {
  auto seq = linear_sequence(6);
  for (std::size_t f = 0; f < seq.size(); ++f) seq[f].push_back(rect_channel(80, 120, 50, 60, 80, 90));
  const auto result = run_filter(seq, TrackerVariant::cv());
  ASSERT_EQ(result.track.size(), 12u);
  EXPECT_EQ(result.track[4].object_id, 1);
  EXPECT_EQ(result.track[5].object_id, 2);
  EXPECT_EQ(result.labels[3](55, 85), 2);
  EXPECT_EQ(result.labels[3](18, 20), 1);
}

TEST(RunFilter, Errors) {
  EXPECT_THROW(run_filter(std::span<const std::vector<Grid2D>>{}, TrackerVariant::cv()), InvalidArgument);
  auto seq = linear_sequence(3);
  seq[2][0] = Grid2D(80, 121, 0.0);
  EXPECT_THROW(run_filter(seq, TrackerVariant::cv()), DimensionError);
  auto seq2 = linear_sequence(3);
  seq2[1].push_back(seq2[1][0]);
  EXPECT_THROW(run_filter(seq2, TrackerVariant::cv()), DimensionError);
}

TEST(RunFilter, Deterministic) {
  auto seq = linear_sequence(10);
  seq[4][0](70, 100) = 0.9;
  const auto a = run_filter(seq, TrackerVariant::cv());
  const auto b = run_filter(seq, TrackerVariant::cv());
  EXPECT_EQ(a.filtered, b.filtered);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(TrackCsv, Format) {
  auto seq = linear_sequence(3);
  seq[2][0].fill(0.0);
  const auto result = run_filter(seq, TrackerVariant::cv());
  std::ostringstream out;
  write_track_csv_header(out);
  write_track_csv_rows(out, result.track);
  EXPECT_EQ(out.str(),
            "frame,object_id,x,y,w,h,source\n"
            "1,1,5,10,12,10,warmup\n"
            "2,1,8,12,12,10,warmup\n"
            "3,1,,,,,fallback\n");
}

}  // namespace
}  // namespace vostk
