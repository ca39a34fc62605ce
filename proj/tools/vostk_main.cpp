// Copyright 2026 The vostk Authors
// SPDX-License-Identifier: Apache-2.0

// vostk: synthetic corpora, prediction filtering, tracker training,
// evaluation, gradient checks and checkpoint surgery from the shell.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace vostk::cli;

  CLI::App app{"Video object segmentation post-processing toolkit"};
  app.set_version_flag("--version", std::string("vostk ") + VOSTK_VERSION);
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus (ground truth + corrupted predictions)");
  synth_cmd->add_option("scene", synth.request, "Scene or sampler JSON")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("out", synth.out, "Output corpus directory")->required();
  synth_cmd->add_option("--jobs", synth.jobs, "Sequences generated in parallel")->check(CLI::PositiveNumber);

  FilterOptions filter;
  auto* filter_cmd = app.add_subcommand("filter", "Filter predicted masks with the box tracker");
  filter_cmd->add_option("in", filter.in, "Input corpus")->required();
  filter_cmd->add_option("out", filter.out, "Output corpus")->required();
  filter_cmd->add_option("--variant", filter.variant, "cv or pt")->check(CLI::IsMember({"cv", "pt"}));
  filter_cmd->add_option("--weights", filter.weights, "Parametric tracker weights (.tvck)");
  filter_cmd->add_option("--margin", filter.margin, "Gate margin as a fraction of box size")
      ->check(CLI::NonNegativeNumber);
  filter_cmd->add_option("--jobs", filter.jobs, "Sequences filtered in parallel")->check(CLI::PositiveNumber);
  filter_cmd->add_flag("--dump-overlay", filter.dump_overlay, "Write per-frame attention maps as PGM");

  TrainPtOptions train;
  auto* train_cmd = app.add_subcommand("train-pt", "Train the parametric tracker on ground-truth masks");
  train_cmd->add_option("corpora", train.corpora, "Corpus directories with masks_gt")->required();
  train_cmd->add_option("--out", train.out, "Output weights (.tvck)")->required();
  train_cmd->add_option("--epochs", train.epochs)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--batch", train.batch)->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.lr)->check(CLI::PositiveNumber);
  train_cmd->add_option("--lambda-small", train.lambda_small, "Loss weight for boxes smaller than ground truth")
      ->check(CLI::Range(1.0, 1e6));
  train_cmd->add_option("--seed", train.seed);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Region (J) and contour (F) accuracy of predictions");
  eval_cmd->add_option("pred", eval.pred, "Corpus with predictions")->required();
  eval_cmd->add_option("gt", eval.gt, "Corpus with ground truth")->required();
  eval_cmd->add_option("--report", eval.report, "Report CSV path")->required();
  eval_cmd->add_option("--pred-subdir", eval.pred_subdir, "Mask directory read from the prediction corpus");
  eval_cmd->add_option("--gt-subdir", eval.gt_subdir, "Mask directory read from the ground-truth corpus");
  eval_cmd->add_option("--jobs", eval.jobs, "Sequences evaluated in parallel")->check(CLI::PositiveNumber);

  GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every analytic gradient");
  grad_cmd->add_option("--seed", grad.seed);
  grad_cmd->add_option("--sizes", grad.sizes, "Square instance sizes")->delimiter(',');
  grad_cmd->add_option("--seeds", grad.seeds, "Instances per size")->check(CLI::PositiveNumber);

  TransplantOptions tp;
  auto* tp_cmd = app.add_subcommand("transplant", "Copy prefixed parameters from one checkpoint into another");
  tp_cmd->add_option("--target", tp.target)->required();
  tp_cmd->add_option("--source", tp.source)->required();
  tp_cmd->add_option("--prefix", tp.prefix)->required();
  tp_cmd->add_option("--out", tp.out)->required();
  tp_cmd->add_flag("--strict", tp.strict, "Fail on a shape mismatch instead of skipping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (*synth_cmd) return run_synth(synth);
  if (*filter_cmd) return run_filter_cmd(filter);
  if (*train_cmd) return run_train_pt(train);
  if (*eval_cmd) return run_eval(eval);
  if (*grad_cmd) return run_gradcheck_cmd(grad);
  if (*tp_cmd) return run_transplant(tp);
  return kExitInternal;
}
