// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. All tolerances and corpus parameters live here.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <string>

#include "cli_runner.hpp"
#include "vostk/checkpoint.hpp"
#include "vostk/gradcheck.hpp"
#include "vostk/losses.hpp"
#include "vostk/metrics.hpp"
#include "vostk/pt_model.hpp"
#include "vostk/rng.hpp"
#include "vostk/synth.hpp"
#include "vostk/tracker.hpp"

namespace {

using namespace vostk;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long rss_kib() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmRSS:", 0) == 0) return std::stol(line.substr(6));
  }
  return -1;
}

Grid2D blocky(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Grid2D t(n, n);
  Grid2D blocks((n + 3) / 4, (n + 3) / 4);
  for (auto& v : blocks.values()) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) t(r, c) = blocks(r / 4, c / 4);
  }
  return t;
}

// AC1 ----------------------------------------------------------------------
Outcome ac1_gradients() {
  Outcome o;
  GradCheckConfig cfg;  // sizes 8/16/32, 10 seeds each
  const auto t0 = std::chrono::steady_clock::now();
  const auto items = run_gradcheck(cfg);
  const double secs = seconds_since(t0);
  const std::map<std::string, double> expected_tol{{"ce_loss", 1e-4}, {"iou_loss", 1e-4},     {"ssim_loss", 1e-3},
                                                   {"total_loss", 1e-3}, {"gelu", 1e-4}, {"mlp_backward", 1e-4}};
  o.require(items.size() == expected_tol.size(), "6 items");
  for (const auto& it : items) {
    const double tol = expected_tol.at(it.name);
    o.require(it.max_rel_error < tol && it.instances >= 10,
              it.name + " " + fmt("%.2e", it.max_rel_error) + " < " + fmt("%.0e", tol));
  }
  o.require(secs < 30.0, "runtime " + fmt("%.1f", secs) + " s < 30 s");
  return o;
}

// AC2 ----------------------------------------------------------------------
Outcome ac2_identities() {
  Outcome o;
  const Grid2D mask = blocky(32, 1);
  const double ssim_self = ssim_loss(mask, mask).value;
  o.require(std::abs(ssim_self) <= 1e-6, "ssim(m,m) " + fmt("%.1e", ssim_self));

  Grid2D left(16, 16, 0.0), right(16, 16, 0.0);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) (c < 8 ? left : right)(r, c) = 1.0;
  }
  const double iou_disjoint = iou_loss(left, right).value;
  o.require(std::abs(iou_disjoint - 1.0) <= 1e-6, "iou disjoint " + fmt("%.9f", iou_disjoint));

  const double ce_half = ce_loss(Grid2D(16, 16, 0.5), blocky(16, 2)).value;
  o.require(std::abs(ce_half - std::log(2.0)) <= 1e-9, "ce(0.5) - ln2 " + fmt("%.1e", ce_half - std::log(2.0)));

  const double iou_soft = iou_loss(Grid2D(16, 16, 0.5), left).value;
  o.require(std::abs(iou_soft - 2.0 / 3.0) <= 1e-9, "soft iou half-overlap " + fmt("%.12f", iou_soft));

  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    SplitMix64 rng(100 + s);
    Grid2D p(24, 24);
    for (auto& v : p.values()) v = rng.uniform(0.01, 0.99);
    const Grid2D t = blocky(24, 200 + s);
    const double sum = ce_loss(p, t).value + ssim_loss(p, t).value + iou_loss(p, t).value;
    worst = std::max(worst, std::abs(total_loss(p, t).value - sum));
  }
  o.require(worst <= 1e-12, "total - sum " + fmt("%.1e", worst));
  return o;
}

// AC3 ----------------------------------------------------------------------
SceneSampler ac3_sampler() {
  SceneSampler s;  // 480x854, 30 frames, linear motion
  s.corruption = {2, 40, 80, 40.0, 0.02};
  return s;
}

Outcome ac3_cv_oracle() {
  Outcome o;
  const auto scenes = sample_corpus(ac3_sampler(), 20, 2026);
  long box_checks = 0, box_errors = 0, blobs = 0, blobs_left = 0;
  std::vector<SequenceScore> raw_scores, filt_scores;
  bool shape_ok = true;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& cfg = scenes[i];
    shape_ok = shape_ok && cfg.frames >= 30 && cfg.height == 480 && cfg.width == 854 &&
               std::all_of(cfg.objects.begin(), cfg.objects.end(),
                           [](const ObjectSpec& ob) { return ob.motion.kind == MotionKind::kLinear; });
    const auto scene = generate(cfg);
    for (std::size_t f = 2; f < scene.boxes.size(); ++f) {
      for (std::size_t k = 0; k < cfg.objects.size(); ++k) {
        ++box_checks;
        const BBox pred = cv_predict(scene.boxes[f - 1][k].box, scene.boxes[f - 2][k].box);
        if (!(pred == scene.boxes[f][k].box)) ++box_errors;
      }
    }
    const auto noisy = corrupt(scene.gt, cfg);
    std::vector<LabelMask> raw;
    for (const auto& fr : noisy.frames) raw.push_back(compose_labels(fr));
    const auto result = run_filter(noisy.frames, TrackerVariant::cv());
    for (std::size_t f = 0; f < noisy.blobs.size(); ++f) {
      for (std::size_t k = 0; k < noisy.blobs[f].size(); ++k) {
        for (const auto& b : noisy.blobs[f][k]) {
          ++blobs;
          bool cleared = true;
          for (int r = b.row0; r < b.row1 && cleared; ++r) {
            for (int c = b.col0; c < b.col1; ++c) {
              if (result.filtered[f][k](r, c) != 0.0) {
                cleared = false;
                break;
              }
            }
          }
          if (!cleared) ++blobs_left;
        }
      }
    }
    const std::string name = "seq" + std::to_string(i);
    raw_scores.push_back(evaluate_sequence(raw, scene.gt, name));
    filt_scores.push_back(evaluate_sequence(result.labels, scene.gt, name));
  }
  const double j_raw = aggregate(raw_scores).mean_j;
  const double j_filt = aggregate(filt_scores).mean_j;
  o.require(shape_ok, "20 linear sequences, 30 frames, 480x854");
  o.require(box_errors == 0, "cv box errors " + std::to_string(box_errors) + "/" + std::to_string(box_checks));
  o.require(blobs > 0 && blobs_left == 0,
            "blobs removed " + std::to_string(blobs - blobs_left) + "/" + std::to_string(blobs));
  o.require(j_raw < 0.9, "unfiltered J " + fmt("%.4f", j_raw) + " < 0.9");
  o.require(j_filt > j_raw + 0.03, "filtered J " + fmt("%.4f", j_filt) + " > unfiltered + 0.03");
  return o;
}

// AC4 ----------------------------------------------------------------------
struct Split {
  std::vector<MotionTriple> train, test;
};

Split triples_for(const SceneSampler& s) {
  Split out;
  const auto scenes = sample_corpus(s, 25, 11);  // first 20 train, last 5 held out
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto t = extract_triples(generate(scenes[i]).gt);
    auto& dst = i < 20 ? out.train : out.test;
    dst.insert(dst.end(), t.begin(), t.end());
  }
  return out;
}

Outcome ac4_pt() {
  Outcome o;
  PtTrainConfig cfg;  // library defaults
  cfg.seed = 3;

  SceneSampler linear;
  const Split lin = triples_for(linear);
  const Mlp m_lin = train_pt(make_pt_model(cfg.seed), lin.train, cfg).model;
  double abs_err = 0.0;
  for (const auto& t : lin.test) {
    const BBox p = pt_predict(m_lin, t.bb_prev, t.bb_prev + t.t_in * -1.0, t.frame_height, t.frame_width);
    abs_err += std::abs(p.x - t.bb_target.x) + std::abs(p.y - t.bb_target.y) + std::abs(p.w - t.bb_target.w) +
               std::abs(p.h - t.bb_target.h);
  }
  const double mae = abs_err / (4.0 * static_cast<double>(lin.test.size()));
  o.require(!lin.test.empty() && mae < 1.0, "linear held-out MAE " + fmt("%.4f", mae) + " px < 1.0");

  SceneSampler accel;
  accel.motion = MotionKind::kAccelerating;
  accel.max_speed = 4;
  const Split acc = triples_for(accel);
  const Mlp m_acc = train_pt(make_pt_model(cfg.seed), acc.train, cfg).model;
  double pt = 0.0, cv = 0.0;
  for (const auto& t : acc.test) {
    const BBox prev2 = t.bb_prev + t.t_in * -1.0;
    pt += pt_loss(pt_predict(m_acc, t.bb_prev, prev2, t.frame_height, t.frame_width), t.bb_target,
                  cfg.lambda_small)
              .value;
    cv += pt_loss(cv_predict(t.bb_prev, prev2), t.bb_target, cfg.lambda_small).value;
  }
  pt /= static_cast<double>(acc.test.size());
  cv /= static_cast<double>(acc.test.size());
  o.require(!acc.test.empty() && pt < cv, "accelerating held-out pt_loss PT " + fmt("%.4f", pt) + " < CV " +
                                              fmt("%.4f", cv));
  return o;
}

// AC5 ----------------------------------------------------------------------
Outcome ac5_metrics() {
  Outcome o;
  SceneSampler s;
  s.height = 120;
  s.width = 200;
  s.frames = 10;
  s.min_size = 12;
  s.max_size = 24;
  s.max_speed = 2;
  s.max_objects = 3;
  s.corruption = {1, 4, 10, 14.0, 0.1};
  std::vector<SequenceScore> scores;
  std::vector<double> object_means;
  for (const auto& cfg : sample_corpus(s, 5, 55)) {
    const auto scene = generate(cfg);
    const auto noisy = corrupt(scene.gt, cfg);
    std::vector<LabelMask> pred;
    for (const auto& f : noisy.frames) pred.push_back(compose_labels(f));
    scores.push_back(evaluate_sequence(pred, scene.gt));
    // Independent recount straight from the label maps.
    for (std::size_t k = 1; k <= cfg.objects.size(); ++k) {
      double sum = 0.0;
      int n = 0;
      bool present = false;
      for (std::size_t f = 0; f < scene.gt.size(); ++f) {
        long inter = 0, uni = 0;
        for (std::size_t i = 0; i < scene.gt[f].size(); ++i) {
          const bool p = pred[f][i] == k, g = scene.gt[f][i] == k;
          inter += p && g;
          uni += p || g;
          present = present || g;
        }
        if (uni > 0) {
          sum += static_cast<double>(inter) / static_cast<double>(uni);
          ++n;
        }
      }
      if (present) object_means.push_back(n ? sum / n : 1.0);
    }
  }
  double brute = 0.0;
  for (double v : object_means) brute += v;
  brute /= static_cast<double>(object_means.size());
  const double j = aggregate(scores).mean_j;
  o.require(std::abs(j - brute) <= 1e-12, "corpus J " + fmt("%.6f", j) + " vs recount diff " +
                                              fmt("%.1e", std::abs(j - brute)));

  BinaryMask a(100, 100, 0), b(100, 100, 0);
  for (int r = 40; r < 50; ++r) {
    for (int c = 40; c < 50; ++c) {
      a(r, c) = 1;
      b(r, c + 1) = 1;
    }
  }
  o.require(contour_f(a, a) == 1.0, "F(identical) = 1");
  o.require(contour_f(a, b) == 1.0 && contour_f(b, a) == 1.0, "F(1-px shift) = 1 both ways");
  o.require(jaccard(a, b) == jaccard(b, a), "J symmetric");
  return o;
}

// AC6 ----------------------------------------------------------------------
Outcome ac6_checkpoint(const fs::path& work) {
  Outcome o;
  ParamStore target;
  target.add("encoder.stem.weight", {4, 3}, std::vector<float>(12, 0.5f));
  target.add("decoder.up.weight", {2, 2}, {1, 2, 3, 4});
  target.add("decoder.head.bias", {3}, {0, 0, 0});
  target.add("decoder.skip.weight", {2}, {5, 6});
  ParamStore source;
  source.add("decoder.up.weight", {2, 2}, {-1, -2, -3, -4});
  source.add("decoder.head.bias", {3}, {7, 8, 9});
  source.add("decoder.skip.weight", {3}, {1, 1, 1});  // shape differs
  source.add("encoder.stem.weight", {4, 3}, std::vector<float>(12, -1.0f));

  save(target, work / "t.tvck");
  const auto bytes = serialize(target);
  const std::string on_disk = test::slurp(work / "t.tvck");
  const ParamStore back = load(work / "t.tvck");
  o.require(back == target && std::string(bytes.begin(), bytes.end()) == on_disk && serialize(back) == bytes,
            "save/load byte-exact");

  const auto [once, report] = transplant(target, source, "decoder.");
  bool exact = true;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto& before = target.entries()[i];
    const auto& after = once.entries()[i];
    const ParamEntry* src = source.find(before.name);
    const bool should_change = before.name.rfind("decoder.", 0) == 0 && src && src->shape == before.shape;
    exact = exact && after.name == before.name && after.shape == before.shape &&
            after.data == (should_change ? src->data : before.data);
  }
  o.require(exact && report.transplanted.size() == 2, "transplant changes exactly the prefixed, shape-matched entries");
  o.require(transplant(once, source, "decoder.").store == once, "idempotent");

  auto corrupted = bytes;
  corrupted[0] = 'X';
  bool magic_error = false;
  try {
    deserialize(corrupted);
  } catch (const CheckpointError& e) {
    magic_error = e.kind() == CheckpointError::Kind::kBadMagic;
  }
  o.require(magic_error, "corrupted magic -> format error");
  return o;
}

// AC7 ----------------------------------------------------------------------
Outcome ac7_determinism(const fs::path& work) {
  Outcome o;
  using test::run_cli;
  std::ofstream(work / "req.json")
      << R"({"sequences": 4, "seed": 21, "sampler": {"height": 96, "width": 160, "frames": 10, "objects": [1, 2],)"
         R"( "size": [14, 26], "max_speed": 2, "corruption": {"blobs_per_frame": 2, "blob_min": 5, "blob_max": 9,)"
         R"( "min_distance": 16, "flip_prob": 0.05}}})";
  auto q = [&](const std::string& rel) { return "\"" + (work / rel).string() + "\""; };
  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const std::string r(run);
    const std::string jobs = r == "a" ? " --jobs 1" : " --jobs 3";
    ok = ok && run_cli(VOSTK_CLI, "synth " + q("req.json") + " " + q(r + "/corpus") + jobs) == 0;
    ok = ok && run_cli(VOSTK_CLI, "train-pt " + q(r + "/corpus") + " --epochs 5 --seed 4 --out " +
                                      q(r + "/w.tvck"), work / r / "train.txt") == 0;
    ok = ok && run_cli(VOSTK_CLI, "filter --variant cv " + q(r + "/corpus") + " " + q(r + "/cv") + jobs) == 0;
    ok = ok && run_cli(VOSTK_CLI, "filter --variant pt --weights " + q(r + "/w.tvck") + " --dump-overlay " +
                                      q(r + "/corpus") + " " + q(r + "/pt") + jobs) == 0;
    ok = ok && run_cli(VOSTK_CLI, "eval " + q(r + "/cv") + " " + q(r + "/corpus") + " --report " +
                                      q(r + "/report.csv") + jobs, work / r / "eval.txt") == 0;
    ok = ok && run_cli(VOSTK_CLI, "transplant --target " + q(r + "/w.tvck") + " --source " + q("a/w.tvck") +
                                      " --prefix pt.layer4 --out " + q(r + "/t.tvck"), work / r / "tp.txt") == 0;
  }
  // gradcheck reports its runtime on stderr, so only stdout is compared.
  for (const char* r : {"a", "b"}) {
    const std::string log = (work / r / "gradcheck.txt").string();
    ok = ok && std::system(("\"" + std::string(VOSTK_CLI) + "\" gradcheck --sizes 8 --seeds 2 --seed 6 >\"" + log +
                            "\" 2>/dev/null").c_str()) == 0;
  }
  o.require(ok, "all commands exit 0");
  const auto files = test::file_list(work / "a");
  o.require(test::same_tree(work / "a", work / "b"),
            std::to_string(files.size()) + " artifacts byte-identical across reruns (jobs 1 vs 3)");
  return o;
}

// AC8 ----------------------------------------------------------------------
Outcome ac8_performance() {
  Outcome o;
  constexpr int kH = 480, kW = 854;
  auto frame_at = [](int f, std::vector<Grid2D>& ch) {
    ch[0].fill(0.0);
    const int r0 = 100 + (f % 200) / 2;
    const int c0 = 100 + (f % 400);
    for (int r = r0; r < r0 + 120; ++r) {
      for (int c = c0; c < c0 + 150; ++c) ch[0](r, c) = 0.95;
    }
    // A far distractor on every frame.
    for (int r = 20; r < 60; ++r) {
      for (int c = 780; c < 830; ++c) ch[0](r, c) = 0.9;
    }
  };

  double filter_secs = 0.0;
  {
    SequenceFilter filter(TrackerVariant::cv());
    std::vector<Grid2D> ch{Grid2D(kH, kW)};
    for (int f = 0; f < 100; ++f) {
      frame_at(f, ch);
      const auto t0 = std::chrono::steady_clock::now();
      filter.push(ch);
      const LabelMask labels = compose_labels(ch);
      filter_secs += seconds_since(t0);
    }
  }
  o.require(filter_secs < 1.0, "100 frames 480x854 in " + fmt("%.3f", filter_secs) + " s < 1 s");

  SequenceFilter filter(TrackerVariant::cv());
  std::vector<Grid2D> ch{Grid2D(kH, kW)};
  long rss_100 = 0;
  for (int f = 0; f < 1000; ++f) {
    frame_at(f, ch);
    filter.push(ch);
    const LabelMask labels = compose_labels(ch);
    if (f == 99) rss_100 = rss_kib();
  }
  const long growth = rss_kib() - rss_100;
  // One frame of doubles is ~3.2 MiB; growth must stay below that.
  o.require(rss_100 > 0 && growth < 3 * 1024,
            "RSS growth frames 100..1000 " + std::to_string(growth) + " KiB < 3072 KiB");
  return o;
}

// AC9 ----------------------------------------------------------------------
Outcome ac9_toy() {
  Outcome o;
  SplitMix64 rng(7);
  std::vector<Grid2D> features{Grid2D(32, 32), Grid2D(32, 32)};
  Grid2D target(32, 32);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const bool in = r >= 8 && r < 24 && c >= 6 && c < 20;
      target(r, c) = in ? 1.0 : 0.0;
      features[0](r, c) = (in ? 1.0 : -1.0) + rng.uniform(-0.5, 0.5);
      features[1](r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  const auto fit = fit_toy_segmenter(features, target, {}, 500, 0.5);
  const double ratio = fit.loss_history.back() / fit.loss_history.front();
  o.require(ratio <= 0.1, "L_total " + fmt("%.4f", fit.loss_history.front()) + " -> " +
                              fmt("%.4f", fit.loss_history.back()) + " (ratio " + fmt("%.4f", ratio) + " <= 0.1)");
  return o;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("vostk_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work / "a");
  fs::create_directories(work / "b");

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 gradient correctness", ac1_gradients},
      {"AC2 loss identities", ac2_identities},
      {"AC3 CV oracle + blob removal", ac3_cv_oracle},
      {"AC4 PT vs CV", ac4_pt},
      {"AC5 metrics oracle", ac5_metrics},
      {"AC6 checkpoint", [&] { return ac6_checkpoint(work); }},
      {"AC7 CLI determinism", [&] { return ac7_determinism(work); }},
      {"AC8 performance + constant memory", ac8_performance},
      {"AC9 toy segmenter", ac9_toy},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %-36s (%5.1f s) %s\n", out.pass ? "PASS" : "FAIL", name, seconds_since(t0), out.detail.c_str());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  fs::remove_all(work);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
