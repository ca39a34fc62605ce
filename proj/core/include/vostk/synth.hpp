// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vostk/bbox.hpp"
#include "vostk/grid.hpp"

namespace vostk {

enum class ShapeKind { kRectangle, kEllipse };
enum class MotionKind { kLinear, kAccelerating, kSinusoidal };

/// Position of the box's top-left corner at frame index t = C - 1:
///   linear        p0 + v t
///   accelerating  p0 + v t + a t^2 / 2
///   sinusoidal    p0 + amplitude sin(2 pi t / period)
/// Width and height stay constant.
struct MotionModel {
  MotionKind kind = MotionKind::kLinear;
  double vx = 0.0, vy = 0.0;
  double ax = 0.0, ay = 0.0;
  double amplitude_x = 0.0, amplitude_y = 0.0;
  double period = 1.0;
};

struct ObjectSpec {
  ShapeKind shape = ShapeKind::kRectangle;
  BBox initial;
  MotionModel motion;
};

struct CorruptionSpec {
  int blobs_per_frame = 0;
  int blob_min = 8;     // blob side length range, px
  int blob_max = 24;
  double min_distance = 32.0;  // Chebyshev gap between blob and true box, px
  double flip_prob = 0.0;      // per boundary-band pixel
};

struct SceneConfig {
  int height = 480;
  int width = 854;
  int frames = 30;
  std::vector<ObjectSpec> objects;
  CorruptionSpec corruption;
  std::uint64_t seed = 0;

  /// Throws ConfigError when the scene cannot be generated or corrupted as
  /// specified (too few frames, an object leaving the frame, a blob
  /// distance not above the worst constant-velocity error, ...).
  void validate() const;
};

/// Rendered box of one object in one frame, after rounding to whole pixels
/// and clipping to the frame.
struct AnalyticBox {
  BBox box;
  bool clipped = false;
};

struct GeneratedScene {
  std::vector<LabelMask> gt;                      // [frame]
  std::vector<std::vector<AnalyticBox>> boxes;    // [frame][object]
};

/// Continuous, unrounded box of `object` at 1-based `frame`.
BBox nominal_box(const ObjectSpec& object, int frame);
/// nominal_box rounded half-up to whole pixels (width/height at least 1).
PixelRect rounded_rect(const ObjectSpec& object, int frame);

/// Renders the scene. Objects are drawn in order; later ids overwrite
/// earlier ones where they overlap. Rectangles fill their rounded box,
/// ellipses are inscribed in it (pixel-centre test).
GeneratedScene generate(const SceneConfig& config);

struct CorruptedSequence {
  std::vector<std::vector<Grid2D>> frames;                  // [frame][object]
  std::vector<std::vector<std::vector<PixelRect>>> blobs;   // [frame][object][blob]
};

inline constexpr int kFirstCorruptedFrame = 3;
inline constexpr double kBlobProbability = 0.9;

/// Per object channel: the ground-truth indicator with boundary-band pixels
/// flipped at flip_prob, plus blobs_per_frame rectangles of probability 0.9
/// from frame 3 on, each at least min_distance from the object's true box and
/// separated from one another. Draws come from SplitMix64(config.seed) in
/// frame, object, pixel order. Throws ConfigError when a blob cannot be placed
/// within 100 attempts.
CorruptedSequence corrupt(std::span<const LabelMask> gt, const SceneConfig& config);

/// Randomised scene family for corpus generation.
struct SceneSampler {
  int height = 480;
  int width = 854;
  int frames = 30;
  int min_objects = 1;
  int max_objects = 2;
  int min_size = 60;
  int max_size = 140;
  bool ellipses = false;
  MotionKind motion = MotionKind::kLinear;
  int max_speed = 6;        // integer velocities in [-max_speed, max_speed]
  double accel_x = 0.5;     // shared acceleration for kAccelerating
  double accel_y = 0.3;
  double min_amplitude = 10.0;
  double max_amplitude = 60.0;
  double min_period = 10.0;
  double max_period = 40.0;
  CorruptionSpec corruption;
};

/// Draws object count, sizes, motions and start positions so that every
/// object stays fully inside the frame and no two objects overlap.
SceneConfig sample_scene(const SceneSampler& sampler, std::uint64_t seed);

/// `count` scenes whose seeds are successive outputs of SplitMix64(seed).
std::vector<SceneConfig> sample_corpus(const SceneSampler& sampler, int count, std::uint64_t seed);

/// JSON with sorted keys; from_json accepts what to_json writes.
std::string scene_to_json(const SceneConfig& config);
SceneConfig scene_from_json(const std::string& text);

/// A synth request is either one explicit scene (has "objects"), or
/// {"sequences": N, "seed": S, "sampler": {...}}. Returns resolved scenes.
std::vector<SceneConfig> resolve_synth_request(const std::string& text);

}  // namespace vostk
