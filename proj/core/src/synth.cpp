// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "vostk/rng.hpp"
#include "vostk/tracker.hpp"

namespace vostk {
namespace {

using nlohmann::json;

PixelRect clip(const PixelRect& r, int height, int width) {
  return {std::max(r.row0, 0), std::min(r.row1, height), std::max(r.col0, 0), std::min(r.col1, width)};
}

BBox rect_box(const PixelRect& r) {
  return {static_cast<double>(r.col0), static_cast<double>(r.row0),
          static_cast<double>(r.col1 - r.col0), static_cast<double>(r.row1 - r.row0)};
}

double round_half_up(double v) { return std::floor(v + 0.5); }

void render(LabelMask& labels, const ObjectSpec& obj, const PixelRect& full, std::uint8_t id) {
  const PixelRect vis = clip(full, labels.height(), labels.width());
  if (obj.shape == ShapeKind::kRectangle) {
    for (int r = vis.row0; r < vis.row1; ++r) {
      for (int c = vis.col0; c < vis.col1; ++c) labels(r, c) = id;
    }
    return;
  }
  const double cx = 0.5 * (full.col0 + full.col1), cy = 0.5 * (full.row0 + full.row1);
  const double rx = 0.5 * (full.col1 - full.col0), ry = 0.5 * (full.row1 - full.row0);
  for (int r = vis.row0; r < vis.row1; ++r) {
    for (int c = vis.col0; c < vis.col1; ++c) {
      const double u = (c + 0.5 - cx) / rx, v = (r + 0.5 - cy) / ry;
      if (u * u + v * v <= 1.0) labels(r, c) = id;
    }
  }
}

// Pixels whose indicator differs from at least one 4-neighbour.
std::vector<std::size_t> boundary_band(const Grid2D& ind) {
  const int h = ind.height(), w = ind.width();
  std::vector<std::size_t> band;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = ind(r, c);
      const bool edge = (r > 0 && ind(r - 1, c) != v) || (r + 1 < h && ind(r + 1, c) != v) ||
                        (c > 0 && ind(r, c - 1) != v) || (c + 1 < w && ind(r, c + 1) != v);
      if (edge) band.push_back(static_cast<std::size_t>(r) * w + c);
    }
  }
  return band;
}

const char* to_string(MotionKind k) {
  switch (k) {
    case MotionKind::kLinear: return "linear";
    case MotionKind::kAccelerating: return "accelerating";
    case MotionKind::kSinusoidal: return "sinusoidal";
  }
  return "linear";
}

MotionKind motion_kind(const std::string& s) {
  if (s == "linear") return MotionKind::kLinear;
  if (s == "accelerating") return MotionKind::kAccelerating;
  if (s == "sinusoidal") return MotionKind::kSinusoidal;
  throw ConfigError("unknown motion model '" + s + "'");
}

ShapeKind shape_kind(const std::string& s) {
  if (s == "rectangle") return ShapeKind::kRectangle;
  if (s == "ellipse") return ShapeKind::kEllipse;
  throw ConfigError("unknown shape '" + s + "'");
}

json corruption_to_json(const CorruptionSpec& c) {
  return json{{"blobs_per_frame", c.blobs_per_frame},
              {"blob_size", {c.blob_min, c.blob_max}},
              {"min_distance", c.min_distance},
              {"flip_prob", c.flip_prob}};
}

CorruptionSpec corruption_from_json(const json& j) {
  CorruptionSpec c;
  c.blobs_per_frame = j.value("blobs_per_frame", c.blobs_per_frame);
  if (j.contains("blob_size")) {
    c.blob_min = j.at("blob_size").at(0).get<int>();
    c.blob_max = j.at("blob_size").at(1).get<int>();
  }
  c.min_distance = j.value("min_distance", c.min_distance);
  c.flip_prob = j.value("flip_prob", c.flip_prob);
  return c;
}

json motion_to_json(const MotionModel& m) {
  json j{{"type", to_string(m.kind)}};
  switch (m.kind) {
    case MotionKind::kLinear:
      j["velocity"] = {m.vx, m.vy};
      break;
    case MotionKind::kAccelerating:
      j["velocity"] = {m.vx, m.vy};
      j["acceleration"] = {m.ax, m.ay};
      break;
    case MotionKind::kSinusoidal:
      j["amplitude"] = {m.amplitude_x, m.amplitude_y};
      j["period"] = m.period;
      break;
  }
  return j;
}

MotionModel motion_from_json(const json& j) {
  MotionModel m;
  m.kind = motion_kind(j.value("type", std::string("linear")));
  auto pair = [&](const char* key, double& a, double& b) {
    if (j.contains(key)) {
      a = j.at(key).at(0).get<double>();
      b = j.at(key).at(1).get<double>();
    }
  };
  pair("velocity", m.vx, m.vy);
  pair("acceleration", m.ax, m.ay);
  pair("amplitude", m.amplitude_x, m.amplitude_y);
  m.period = j.value("period", m.period);
  return m;
}

SceneSampler sampler_from_json(const json& j) {
  SceneSampler s;
  s.height = j.value("height", s.height);
  s.width = j.value("width", s.width);
  s.frames = j.value("frames", s.frames);
  if (j.contains("objects")) {
    s.min_objects = j.at("objects").at(0).get<int>();
    s.max_objects = j.at("objects").at(1).get<int>();
  }
  if (j.contains("size")) {
    s.min_size = j.at("size").at(0).get<int>();
    s.max_size = j.at("size").at(1).get<int>();
  }
  s.ellipses = j.value("ellipses", s.ellipses);
  s.motion = motion_kind(j.value("motion", std::string("linear")));
  s.max_speed = j.value("max_speed", s.max_speed);
  if (j.contains("acceleration")) {
    s.accel_x = j.at("acceleration").at(0).get<double>();
    s.accel_y = j.at("acceleration").at(1).get<double>();
  }
  if (j.contains("amplitude")) {
    s.min_amplitude = j.at("amplitude").at(0).get<double>();
    s.max_amplitude = j.at("amplitude").at(1).get<double>();
  }
  if (j.contains("period")) {
    s.min_period = j.at("period").at(0).get<double>();
    s.max_period = j.at("period").at(1).get<double>();
  }
  if (j.contains("corruption")) s.corruption = corruption_from_json(j.at("corruption"));
  return s;
}

}  // namespace

BBox nominal_box(const ObjectSpec& object, int frame) {
  const double t = frame - 1;
  const MotionModel& m = object.motion;
  BBox b = object.initial;
  switch (m.kind) {
    case MotionKind::kLinear:
      b.x += m.vx * t;
      b.y += m.vy * t;
      break;
    case MotionKind::kAccelerating:
      b.x += m.vx * t + 0.5 * m.ax * t * t;
      b.y += m.vy * t + 0.5 * m.ay * t * t;
      break;
    case MotionKind::kSinusoidal: {
      const double phase = std::sin(2.0 * std::numbers::pi * t / m.period);
      b.x += m.amplitude_x * phase;
      b.y += m.amplitude_y * phase;
      break;
    }
  }
  return b;
}

PixelRect rounded_rect(const ObjectSpec& object, int frame) {
  const BBox b = nominal_box(object, frame);
  const int x = static_cast<int>(round_half_up(b.x));
  const int y = static_cast<int>(round_half_up(b.y));
  const int w = std::max(1, static_cast<int>(round_half_up(b.w)));
  const int h = std::max(1, static_cast<int>(round_half_up(b.h)));
  return {y, y + h, x, x + w};
}

void SceneConfig::validate() const {
  if (height < 1 || width < 1) throw ConfigError("frame dimensions must be >= 1");
  if (frames < 3) throw ConfigError("a scene needs at least 3 frames");
  if (objects.empty() || objects.size() > 255) throw ConfigError("a scene needs 1..255 objects");
  const auto& c = corruption;
  if (c.blobs_per_frame < 0) throw ConfigError("blobs_per_frame must be >= 0");
  if (c.blob_min < 1 || c.blob_max < c.blob_min) throw ConfigError("blob size range is invalid");
  if (!(c.flip_prob >= 0.0 && c.flip_prob <= 1.0)) throw ConfigError("flip_prob must be in [0, 1]");
  if (!(c.min_distance >= 0.0)) throw ConfigError("min_distance must be >= 0");

  for (std::size_t k = 0; k < objects.size(); ++k) {
    const auto& o = objects[k];
    if (!(o.initial.w > 0.0 && o.initial.h > 0.0) || !o.initial.valid()) {
      throw ConfigError("object " + std::to_string(k + 1) + " has an invalid initial box");
    }
    if (o.motion.kind == MotionKind::kSinusoidal && !(o.motion.period > 0.0)) {
      throw ConfigError("object " + std::to_string(k + 1) + " needs a positive period");
    }
    double worst_cv = 0.0;
    std::optional<BBox> b1, b2;
    for (int f = 1; f <= frames; ++f) {
      const PixelRect vis = clip(rounded_rect(o, f), height, width);
      if (vis.empty()) {
        throw ConfigError("object " + std::to_string(k + 1) + " is fully outside the frame at frame " +
                          std::to_string(f));
      }
      const BBox cur = rect_box(vis);
      if (b1 && b2) {
        const Motion err = cv_predict(*b1, *b2) - cur;
        worst_cv = std::max({worst_cv, std::abs(err.dx), std::abs(err.dy), std::abs(err.dw),
                             std::abs(err.dh)});
      }
      b2 = b1;
      b1 = cur;
    }
    if (c.blobs_per_frame > 0 && !(c.min_distance > worst_cv)) {
      throw ConfigError("min_distance " + std::to_string(c.min_distance) +
                        " does not exceed the worst constant-velocity error " +
                        std::to_string(worst_cv) + " of object " + std::to_string(k + 1));
    }
  }
}

GeneratedScene generate(const SceneConfig& config) {
  config.validate();
  GeneratedScene scene;
  scene.gt.reserve(static_cast<std::size_t>(config.frames));
  scene.boxes.reserve(static_cast<std::size_t>(config.frames));
  for (int f = 1; f <= config.frames; ++f) {
    LabelMask labels(config.height, config.width);
    std::vector<AnalyticBox> boxes;
    for (std::size_t k = 0; k < config.objects.size(); ++k) {
      const PixelRect full = rounded_rect(config.objects[k], f);
      const PixelRect vis = clip(full, config.height, config.width);
      render(labels, config.objects[k], full, static_cast<std::uint8_t>(k + 1));
      boxes.push_back({rect_box(vis), !(vis == full)});
    }
    scene.gt.push_back(std::move(labels));
    scene.boxes.push_back(std::move(boxes));
  }
  return scene;
}

CorruptedSequence corrupt(std::span<const LabelMask> gt, const SceneConfig& config) {
  const auto& spec = config.corruption;
  SplitMix64 rng(config.seed);
  CorruptedSequence out;
  const auto num_objects = config.objects.size();
  for (std::size_t f = 0; f < gt.size(); ++f) {
    const LabelMask& labels = gt[f];
    std::vector<Grid2D> channels;
    std::vector<std::vector<PixelRect>> frame_blobs(num_objects);
    for (std::size_t k = 0; k < num_objects; ++k) {
      const auto id = static_cast<std::uint8_t>(k + 1);
      Grid2D ch = to_real(indicator(labels, id));
      if (spec.flip_prob > 0.0) {
        const auto band = boundary_band(ch);
        for (auto i : band) {
          if (rng.bernoulli(spec.flip_prob)) ch[i] = 1.0 - ch[i];
        }
      }
      const auto truth = bbox_from_mask(labels, id);
      if (static_cast<int>(f) + 1 >= kFirstCorruptedFrame && truth && spec.blobs_per_frame > 0) {
        const PixelRect truth_rect = to_rect(*truth);
        auto& placed = frame_blobs[k];
        for (int b = 0; b < spec.blobs_per_frame; ++b) {
          bool ok = false;
          for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            const int bw = static_cast<int>(rng.uniform_int(spec.blob_min, spec.blob_max));
            const int bh = static_cast<int>(rng.uniform_int(spec.blob_min, spec.blob_max));
            if (bw > labels.width() || bh > labels.height()) continue;
            const int x = static_cast<int>(rng.uniform_int(0, labels.width() - bw));
            const int y = static_cast<int>(rng.uniform_int(0, labels.height() - bh));
            const PixelRect blob{y, y + bh, x, x + bw};
            if (rect_gap(blob, truth_rect) < spec.min_distance) continue;
            if (std::any_of(placed.begin(), placed.end(),
                            [&](const PixelRect& p) { return rect_gap(blob, p) < 1; })) {
              continue;
            }
            placed.push_back(blob);
            ok = true;
          }
          if (!ok) {
            throw ConfigError("cannot place blob " + std::to_string(b + 1) + " for object " +
                              std::to_string(k + 1) + " in frame " + std::to_string(f + 1) +
                              " after 100 attempts");
          }
        }
        for (const auto& blob : placed) {
          for (int r = blob.row0; r < blob.row1; ++r) {
            for (int c = blob.col0; c < blob.col1; ++c) ch(r, c) = std::max(ch(r, c), kBlobProbability);
          }
        }
      }
      channels.push_back(std::move(ch));
    }
    out.frames.push_back(std::move(channels));
    out.blobs.push_back(std::move(frame_blobs));
  }
  return out;
}

SceneConfig sample_scene(const SceneSampler& s, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SceneConfig cfg;
  cfg.height = s.height;
  cfg.width = s.width;
  cfg.frames = s.frames;
  cfg.corruption = s.corruption;
  cfg.seed = seed;
  if (s.min_objects < 1 || s.max_objects < s.min_objects) throw ConfigError("bad object count range");
  if (s.min_size < 1 || s.max_size < s.min_size) throw ConfigError("bad object size range");

  const int count = static_cast<int>(rng.uniform_int(s.min_objects, s.max_objects));
  // Trajectory of each placed object as pixel rects, to reject overlaps.
  std::vector<std::vector<PixelRect>> tracks;
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      ObjectSpec o;
      o.shape = s.ellipses && rng.bernoulli(0.5) ? ShapeKind::kEllipse : ShapeKind::kRectangle;
      o.initial.w = static_cast<double>(rng.uniform_int(s.min_size, s.max_size));
      o.initial.h = static_cast<double>(rng.uniform_int(s.min_size, s.max_size));
      o.motion.kind = s.motion;
      switch (s.motion) {
        case MotionKind::kLinear:
          o.motion.vx = static_cast<double>(rng.uniform_int(-s.max_speed, s.max_speed));
          o.motion.vy = static_cast<double>(rng.uniform_int(-s.max_speed, s.max_speed));
          break;
        case MotionKind::kAccelerating:
          o.motion.vx = static_cast<double>(rng.uniform_int(-s.max_speed, s.max_speed));
          o.motion.vy = static_cast<double>(rng.uniform_int(-s.max_speed, s.max_speed));
          o.motion.ax = s.accel_x;
          o.motion.ay = s.accel_y;
          break;
        case MotionKind::kSinusoidal:
          o.motion.amplitude_x = rng.uniform(s.min_amplitude, s.max_amplitude);
          o.motion.amplitude_y = rng.uniform(s.min_amplitude, s.max_amplitude);
          o.motion.period = rng.uniform(s.min_period, s.max_period);
          break;
      }
      // Extent of the trajectory relative to the start position.
      double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
      for (int f = 1; f <= s.frames; ++f) {
        const BBox b = nominal_box(o, f);
        lo_x = std::min(lo_x, b.x);
        hi_x = std::max(hi_x, b.x);
        lo_y = std::min(lo_y, b.y);
        hi_y = std::max(hi_y, b.y);
      }
      const double x_min = 1.0 - lo_x, x_max = s.width - o.initial.w - hi_x - 1.0;
      const double y_min = 1.0 - lo_y, y_max = s.height - o.initial.h - hi_y - 1.0;
      if (x_max < x_min || y_max < y_min) continue;
      o.initial.x = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(x_min)),
                                                        static_cast<std::int64_t>(std::floor(x_max))));
      o.initial.y = static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(y_min)),
                                                        static_cast<std::int64_t>(std::floor(y_max))));
      std::vector<PixelRect> track;
      for (int f = 1; f <= s.frames; ++f) track.push_back(rounded_rect(o, f));
      // Keep objects apart by more than the blob distance so that their
      // boxes stay unoccluded.
      const int spacing = static_cast<int>(std::ceil(s.corruption.min_distance)) + 1;
      bool clash = false;
      for (const auto& other : tracks) {
        for (std::size_t f = 0; f < track.size() && !clash; ++f) {
          clash = rect_gap(track[f], other[f]) < spacing;
        }
      }
      if (track.front().empty() || clash) continue;
      bool inside = std::all_of(track.begin(), track.end(), [&](const PixelRect& r) {
        return r.row0 >= 0 && r.col0 >= 0 && r.row1 <= s.height && r.col1 <= s.width;
      });
      if (!inside) continue;
      tracks.push_back(std::move(track));
      cfg.objects.push_back(o);
      placed = true;
    }
    if (!placed) throw ConfigError("sample_scene: cannot place object " + std::to_string(k + 1));
  }
  cfg.validate();
  return cfg;
}

std::vector<SceneConfig> sample_corpus(const SceneSampler& sampler, int count, std::uint64_t seed) {
  SplitMix64 master(seed);
  std::vector<SceneConfig> scenes;
  for (int i = 0; i < count; ++i) scenes.push_back(sample_scene(sampler, master()));
  return scenes;
}

std::string scene_to_json(const SceneConfig& config) {
  json objects = json::array();
  for (const auto& o : config.objects) {
    objects.push_back({{"shape", o.shape == ShapeKind::kEllipse ? "ellipse" : "rectangle"},
                       {"box", {o.initial.x, o.initial.y, o.initial.w, o.initial.h}},
                       {"motion", motion_to_json(o.motion)}});
  }
  const json j{{"height", config.height},
               {"width", config.width},
               {"frames", config.frames},
               {"seed", config.seed},
               {"objects", objects},
               {"corruption", corruption_to_json(config.corruption)}};
  return j.dump(2) + "\n";
}

SceneConfig scene_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    SceneConfig cfg;
    cfg.height = j.value("height", cfg.height);
    cfg.width = j.value("width", cfg.width);
    cfg.frames = j.value("frames", cfg.frames);
    cfg.seed = j.value("seed", cfg.seed);
    for (const auto& o : j.at("objects")) {
      ObjectSpec spec;
      spec.shape = shape_kind(o.value("shape", std::string("rectangle")));
      const auto& box = o.at("box");
      spec.initial = {box.at(0).get<double>(), box.at(1).get<double>(), box.at(2).get<double>(),
                      box.at(3).get<double>()};
      if (o.contains("motion")) spec.motion = motion_from_json(o.at("motion"));
      cfg.objects.push_back(spec);
    }
    if (j.contains("corruption")) cfg.corruption = corruption_from_json(j.at("corruption"));
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scene json: ") + e.what());
  }
}

std::vector<SceneConfig> resolve_synth_request(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth request json: ") + e.what());
  }
  if (j.contains("objects")) {
    SceneConfig cfg = scene_from_json(text);
    cfg.validate();
    return {cfg};
  }
  try {
    const int count = j.value("sequences", 1);
    const auto seed = j.value("seed", std::uint64_t{0});
    if (count < 1) throw ConfigError("sequences must be >= 1");
    return sample_corpus(sampler_from_json(j.value("sampler", json::object())), count, seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth request json: ") + e.what());
  }
}

}  // namespace vostk
