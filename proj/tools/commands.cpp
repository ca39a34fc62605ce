// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vostk/checkpoint.hpp"
#include "vostk/corpus_io.hpp"
#include "vostk/gradcheck.hpp"
#include "vostk/metrics.hpp"
#include "vostk/pt_model.hpp"
#include "vostk/synth.hpp"
#include "vostk/tracker.hpp"

namespace vostk::cli {
namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < std::min(workers, n); ++t) {
    threads.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

template <typename F>
int guarded(const char* command, F&& body) {
  try {
    return body();
  } catch (const FormatError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const DimensionError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidArgument& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << command << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

std::string synth_box_csv(const GeneratedScene& scene) {
  std::ostringstream out;
  out << "frame,object_id,x,y,w,h,clipped\n";
  for (std::size_t f = 0; f < scene.boxes.size(); ++f) {
    for (std::size_t k = 0; k < scene.boxes[f].size(); ++k) {
      const auto& b = scene.boxes[f][k];
      out << f + 1 << ',' << k + 1 << ',' << b.box.x << ',' << b.box.y << ',' << b.box.w << ','
          << b.box.h << ',' << (b.clipped ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string sequence_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seq%03zu", i);
  return buf;
}

int max_object_id(const std::vector<LabelMask>& frames) {
  int k = 0;
  for (const auto& f : frames) k = std::max(k, static_cast<int>(max_label(f)));
  return k;
}

void copy_if_present(const fs::path& from, const fs::path& to) {
  if (fs::is_directory(from)) {
    fs::create_directories(to);
    fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  } else if (fs::is_regular_file(from)) {
    fs::copy_file(from, to, fs::copy_options::overwrite_existing);
  }
}

void filter_sequence(const FilterOptions& opts, const std::string& name, const Mlp* model) {
  const fs::path src = opts.in / name;
  const fs::path dst = opts.out / name;
  const auto pred = read_mask_dir(src / kPredDir);
  fs::create_directories(dst);
  copy_if_present(src / kGtDir, dst / kGtDir);
  copy_if_present(src / kSceneFile, dst / kSceneFile);

  const int objects = max_object_id(pred);
  std::ostringstream tracks;
  write_track_csv_header(tracks);
  std::vector<LabelMask> out_frames;
  out_frames.reserve(pred.size());
  if (objects == 0) {
    out_frames = pred;
  } else {
    FilterConfig config;
    config.margin_frac = opts.margin;
    SequenceFilter filter(model != nullptr ? TrackerVariant::pt(*model) : TrackerVariant::cv(), config);
    const fs::path overlay = dst / "overlay";
    if (opts.dump_overlay) fs::create_directories(overlay);
    for (std::size_t f = 0; f < pred.size(); ++f) {
      auto channels = label_channels(pred[f], objects);
      const auto records = filter.push(channels);
      write_track_csv_rows(tracks, records);
      out_frames.push_back(compose_labels(channels));
      if (opts.dump_overlay) {
        for (const auto& r : records) {
          LabelMask gate(pred[f].height(), pred[f].width(), r.gate ? 0 : 255);
          if (r.gate) {
            const auto& rect = r.gate->rect();
            for (int y = rect.row0; y < rect.row1; ++y) {
              for (int x = rect.col0; x < rect.col1; ++x) gate(y, x) = 255;
            }
          }
          char file[64];
          std::snprintf(file, sizeof(file), "%05zu_obj%03d.pgm", f + 1, static_cast<int>(r.object_id));
          write_pgm(gate, overlay / file);
        }
      }
    }
  }
  write_mask_dir(dst / kPredDir, out_frames);
  write_text(dst / kTracksFile, tracks.str());
}

}  // namespace

int run_synth(const SynthOptions& opts) {
  return guarded("synth", [&] {
    const auto scenes = resolve_synth_request(read_text(opts.request));
    fs::create_directories(opts.out);
    parallel_for(scenes.size(), opts.jobs, [&](std::size_t i) {
      const SceneConfig& cfg = scenes[i];
      const fs::path dir = opts.out / sequence_name(i);
      fs::create_directories(dir);
      const GeneratedScene scene = generate(cfg);
      const CorruptedSequence noisy = corrupt(scene.gt, cfg);
      std::vector<LabelMask> pred;
      pred.reserve(noisy.frames.size());
      for (const auto& frame : noisy.frames) pred.push_back(compose_labels(frame));
      write_mask_dir(dir / kGtDir, scene.gt);
      write_mask_dir(dir / kPredDir, pred);
      write_text(dir / kSceneFile, scene_to_json(cfg));
      write_text(dir / "analytic_boxes.csv", synth_box_csv(scene));
    });
    std::cout << "wrote " << scenes.size() << " sequence(s) to " << opts.out.string() << '\n';
    return kExitOk;
  });
}

int run_filter_cmd(const FilterOptions& opts) {
  return guarded("filter", [&] {
    if (opts.variant != "cv" && opts.variant != "pt") {
      std::cerr << "filter: --variant must be cv or pt\n";
      return kExitInput;
    }
    std::optional<Mlp> model;
    if (opts.variant == "pt") {
      if (!opts.weights) {
        std::cerr << "filter: the pt variant requires --weights <file.tvck>\n";
        return kExitMissingDependency;
      }
      if (!fs::exists(*opts.weights)) {
        std::cerr << "filter: weights file " << opts.weights->string() << " not found\n";
        return kExitMissingDependency;
      }
      model = mlp_from_param_store(load(*opts.weights));
    }
    const auto sequences = list_sequences(opts.in);
    fs::create_directories(opts.out);
    parallel_for(sequences.size(), opts.jobs, [&](std::size_t i) {
      filter_sequence(opts, sequences[i], model ? &*model : nullptr);
    });
    std::cout << "filtered " << sequences.size() << " sequence(s) with " << opts.variant << '\n';
    return kExitOk;
  });
}

int run_train_pt(const TrainPtOptions& opts) {
  return guarded("train-pt", [&] {
    std::vector<MotionTriple> triples;
    for (const auto& root : opts.corpora) {
      for (const auto& name : list_sequences(root)) {
        const auto gt = read_mask_dir(root / name / kGtDir);
        const auto t = extract_triples(gt);
        triples.insert(triples.end(), t.begin(), t.end());
      }
    }
    if (triples.empty()) {
      std::cerr << "train-pt: no motion triples in the given corpora\n";
      return kExitInput;
    }
    PtTrainConfig config;
    config.epochs = opts.epochs;
    config.batch = opts.batch;
    config.adam.lr = opts.lr;
    config.lambda_small = opts.lambda_small;
    config.seed = opts.seed;
    const auto result = train_pt(make_pt_model(opts.seed), triples, config);
    save(to_param_store(result.model), opts.out);
    std::printf("triples %zu\ninitial train loss %.6f\nfinal train loss %.6f\n", triples.size(),
                result.loss_history.front(), result.loss_history.back());
    return kExitOk;
  });
}

int run_eval(const EvalOptions& opts) {
  return guarded("eval", [&] {
    const auto sequences = list_sequences(opts.gt);
    std::vector<SequenceScore> scores(sequences.size());
    parallel_for(sequences.size(), opts.jobs, [&](std::size_t i) {
      const auto gt = read_mask_dir(opts.gt / sequences[i] / opts.gt_subdir);
      const auto pred = read_mask_dir(opts.pred / sequences[i] / opts.pred_subdir);
      if (pred.size() != gt.size()) {
        throw FormatError(sequences[i] + ": " + std::to_string(pred.size()) + " predicted frames vs " +
                          std::to_string(gt.size()) + " ground-truth frames");
      }
      scores[i] = evaluate_sequence(pred, gt, sequences[i]);
    });
    const EvalReport report = aggregate(std::move(scores));
    std::ostringstream csv;
    write_report(csv, report);
    if (opts.report.has_parent_path()) fs::create_directories(opts.report.parent_path());
    write_text(opts.report, csv.str());
    write_summary(std::cout, report);
    return kExitOk;
  });
}

int run_gradcheck_cmd(const GradcheckOptions& opts) {
  return guarded("gradcheck", [&] {
    GradCheckConfig config;
    config.seed = opts.seed;
    config.sizes = opts.sizes;
    config.seeds = opts.seeds;
    const auto start = std::chrono::steady_clock::now();
    const auto items = run_gradcheck(config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = true;
    for (const auto& item : items) {
      std::printf("%-14s max_rel_err %.3e  tol %.0e  instances %3d  %s\n", item.name.c_str(),
                  item.max_rel_error, item.tolerance, item.instances, item.passed() ? "ok" : "FAIL");
      ok = ok && item.passed();
    }
    std::fprintf(stderr, "elapsed %.2f s\n", secs);
    return ok ? kExitOk : kExitInternal;
  });
}

int run_transplant(const TransplantOptions& opts) {
  return guarded("transplant", [&] {
    for (const auto& p : {opts.target, opts.source}) {
      if (!fs::exists(p)) {
        std::cerr << "transplant: " << p.string() << " not found\n";
        return kExitMissingDependency;
      }
    }
    const auto result = transplant(load(opts.target), load(opts.source), opts.prefix, opts.strict);
    save(result.store, opts.out);
    const auto& r = result.report;
    std::printf("transplanted %zu, skipped: %zu outside prefix, %zu missing in source, %zu shape mismatch\n",
                r.transplanted.size(), r.skipped_prefix.size(), r.skipped_missing.size(),
                r.skipped_shape.size());
    for (const auto& n : r.transplanted) std::printf("  + %s\n", n.c_str());
    for (const auto& n : r.skipped_missing) std::printf("  ? %s (missing)\n", n.c_str());
    for (const auto& n : r.skipped_shape) std::printf("  ! %s (shape)\n", n.c_str());
    return kExitOk;
  });
}

}  // namespace vostk::cli
