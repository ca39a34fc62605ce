// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "vostk/losses.hpp"
#include "vostk/metrics.hpp"
#include "vostk/numerics.hpp"
#include "vostk/pt_model.hpp"
#include "vostk/rng.hpp"
#include "vostk/tracker.hpp"

namespace {

using namespace vostk;

Grid2D random_grid(int h, int w, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Grid2D g(h, w);
  for (auto& v : g.values()) v = rng.uniform();
  return g;
}

Grid2D rect(int h, int w, int r0, int c0, int size) {
  Grid2D g(h, w, 0.0);
  for (int r = r0; r < r0 + size; ++r) {
    for (int c = c0; c < c0 + size; ++c) g(r, c) = 1.0;
  }
  return g;
}

void BM_WindowedMoments(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid2D g = random_grid(n, n, 1);
  const GaussianWindow w;
  for (auto _ : state) benchmark::DoNotOptimize(windowed_moments(g, w));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_WindowedMoments)->Arg(64)->Arg(256);

void BM_SsimLoss(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid2D p = random_grid(n, n, 2);
  const Grid2D t = rect(n, n, n / 4, n / 4, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(ssim_loss(p, t));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SsimLoss)->Arg(64)->Arg(256);

void BM_TotalLoss(benchmark::State& state) {
  const Grid2D p = random_grid(128, 128, 3);
  const Grid2D t = rect(128, 128, 30, 30, 60);
  for (auto _ : state) benchmark::DoNotOptimize(total_loss(p, t));
}
BENCHMARK(BM_TotalLoss);

// One 480x854 frame through the CV filter, steady state.
void BM_FilterFrame(benchmark::State& state) {
  SequenceFilter filter(TrackerVariant::cv());
  const Grid2D base = rect(480, 854, 150, 200, 120);
  std::vector<Grid2D> ch{base};
  for (int i = 0; i < 3; ++i) {
    ch[0] = base;
    filter.push(ch);
  }
  for (auto _ : state) {
    state.PauseTiming();
    ch[0] = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(filter.push(ch));
  }
}
BENCHMARK(BM_FilterFrame)->Unit(benchmark::kMicrosecond);

void BM_MlpForward(benchmark::State& state) {
  const Mlp m = make_pt_model(1);
  const Motion t{2.0, -1.0, 0.5, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(predict_motion(m, t, 480, 854));
}
BENCHMARK(BM_MlpForward);

void BM_MlpTrainStep(benchmark::State& state) {
  Mlp m = make_pt_model(1);
  Adam opt(m, {});
  const std::vector<double> x{0.2, -0.1, 0.05, 0.0};
  const std::vector<double> up{1.0, 0.5, -0.5, 0.25};
  for (auto _ : state) {
    MlpCache cache;
    mlp_forward(m, x, &cache);
    opt.step(m, mlp_backward(m, cache, up));
  }
}
BENCHMARK(BM_MlpTrainStep);

void BM_ContourF(benchmark::State& state) {
  BinaryMask a(480, 854, 0), b(480, 854, 0);
  for (int r = 100; r < 300; ++r) {
    for (int c = 200; c < 500; ++c) {
      a(r, c) = 1;
      b(r + 3, c + 2) = 1;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(contour_f(a, b));
}
BENCHMARK(BM_ContourF)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
