// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "vostk/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <utility>

namespace vostk {
namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dy * dy + dx * dx <= radius * radius) offsets.emplace_back(dy, dx);
    }
  }
  return offsets;
}

// Count of `from` pixels having a `to` pixel within the disk.
std::size_t matched(const BinaryMask& from, const BinaryMask& to,
                    const std::vector<std::pair<int, int>>& disk) {
  const int h = from.height(), w = from.width();
  std::size_t hits = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!from(r, c)) continue;
      for (const auto& [dy, dx] : disk) {
        const int rr = r + dy, cc = c + dx;
        if (rr >= 0 && rr < h && cc >= 0 && cc < w && to(rr, cc)) {
          ++hits;
          break;
        }
      }
    }
  }
  return hits;
}

double mean_or_one(double sum, std::size_t n) { return n == 0 ? 1.0 : sum / static_cast<double>(n); }

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

double jaccard(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "jaccard");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool a = pred[i] != 0, b = gt[i] != 0;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask boundary(const BinaryMask& mask) {
  const int h = mask.height(), w = mask.width();
  BinaryMask out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask(r, c)) continue;
      const bool edge = r == 0 || c == 0 || r == h - 1 || c == w - 1 || !mask(r - 1, c) ||
                        !mask(r + 1, c) || !mask(r, c - 1) || !mask(r, c + 1);
      out(r, c) = edge ? 1 : 0;
    }
  }
  return out;
}

int default_contour_tolerance(int height, int width) {
  return static_cast<int>(std::ceil(0.008 * std::hypot(static_cast<double>(height),
                                                       static_cast<double>(width))));
}

double contour_f(const BinaryMask& pred, const BinaryMask& gt, std::optional<int> tolerance_px) {
  require_same_shape(pred, gt, "contour_f");
  const int tol = tolerance_px.value_or(default_contour_tolerance(pred.height(), pred.width()));
  if (tol < 0) throw InvalidArgument("contour_f: tolerance must be >= 0");
  const BinaryMask bp = boundary(pred);
  const BinaryMask bg = boundary(gt);
  const std::size_t np = count_nonzero(bp), ng = count_nonzero(bg);
  if (np == 0 && ng == 0) return 1.0;
  if (np == 0 || ng == 0) return 0.0;
  const auto disk = disk_offsets(tol);
  const double precision = static_cast<double>(matched(bp, bg, disk)) / static_cast<double>(np);
  const double recall = static_cast<double>(matched(bg, bp, disk)) / static_cast<double>(ng);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

SequenceScore evaluate_sequence(std::span<const LabelMask> pred, std::span<const LabelMask> gt,
                                std::string name) {
  if (pred.size() != gt.size()) {
    throw DimensionError("evaluate: " + std::to_string(pred.size()) + " predicted frames vs " +
                         std::to_string(gt.size()) + " ground-truth frames");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) require_same_shape(pred[i], gt[i], "evaluate");

  std::set<std::uint8_t> ids;
  for (const auto& m : gt) {
    for (auto v : m.values()) {
      if (v != 0) ids.insert(v);
    }
  }

  SequenceScore seq;
  seq.name = std::move(name);
  double sum_j = 0.0, sum_f = 0.0;
  for (auto id : ids) {
    ObjectScore obj;
    obj.object_id = id;
    double oj = 0.0, of = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const BinaryMask p = indicator(pred[i], id);
      const BinaryMask g = indicator(gt[i], id);
      if (count_nonzero(p) == 0 && count_nonzero(g) == 0) continue;
      FrameScore fs{static_cast<int>(i) + 1, jaccard(p, g), contour_f(p, g)};
      oj += fs.j;
      of += fs.f;
      obj.frames.push_back(fs);
    }
    obj.mean_j = mean_or_one(oj, obj.frames.size());
    obj.mean_f = mean_or_one(of, obj.frames.size());
    sum_j += obj.mean_j;
    sum_f += obj.mean_f;
    seq.objects.push_back(std::move(obj));
  }
  seq.mean_j = mean_or_one(sum_j, seq.objects.size());
  seq.mean_f = mean_or_one(sum_f, seq.objects.size());
  return seq;
}

EvalReport aggregate(std::vector<SequenceScore> sequences) {
  EvalReport report;
  report.sequences = std::move(sequences);
  double sj = 0.0, sf = 0.0;
  std::size_t n = 0;
  for (const auto& s : report.sequences) {
    for (const auto& o : s.objects) {
      sj += o.mean_j;
      sf += o.mean_f;
      ++n;
    }
  }
  report.mean_j = mean_or_one(sj, n);
  report.mean_f = mean_or_one(sf, n);
  return report;
}

EvalReport evaluate(std::span<const LabelMask> pred, std::span<const LabelMask> gt) {
  std::vector<SequenceScore> seqs;
  seqs.push_back(evaluate_sequence(pred, gt));
  return aggregate(std::move(seqs));
}

void write_summary(std::ostream& out, const EvalReport& report) {
  out << "# sequences " << report.sequences.size() << '\n'
      << "# J " << fixed4(report.mean_j) << '\n'
      << "# F " << fixed4(report.mean_f) << '\n'
      << "# J&F " << fixed4(report.mean_jf()) << '\n';
}

void write_report(std::ostream& out, const EvalReport& report) {
  out << "sequence,object,frame,J,F\n";
  for (const auto& s : report.sequences) {
    for (const auto& o : s.objects) {
      for (const auto& f : o.frames) {
        out << s.name << ',' << static_cast<int>(o.object_id) << ',' << f.frame << ','
            << fixed4(f.j) << ',' << fixed4(f.f) << '\n';
      }
    }
  }
  write_summary(out, report);
}

}  // namespace vostk
