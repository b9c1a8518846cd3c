#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "splatseg/error.hpp"

namespace {

using namespace splatseg::cli;

void add_training_flags(CLI::App& cmd, TrainingOverrides& t) {
  cmd.add_option("--config", t.config, "flat TOML or JSON run config");
  cmd.add_option("--epochs", t.epochs);
  cmd.add_option("--lr", t.lr, "splat learning rate");
  cmd.add_option("--lsf-lr", t.lsf_lr, "level-set learning rate");
  cmd.add_option("--mask-sharpness", t.mask_sharpness);
  cmd.add_option("--lambda-m", t.lambda_m);
  cmd.add_option("--lambda-l", t.lambda_l);
  cmd.add_option("--lambda-dice", t.lambda_dice);
  cmd.add_option("--lambda-dtc", t.lambda_dtc);
  cmd.add_option("--k", t.k_sigmoid, "level-set sigmoid steepness");
  cmd.add_option("--dtc-sign", t.dtc_sign);
}

int exit_code(splatseg::ErrorKind kind) {
  switch (kind) {
    case splatseg::ErrorKind::usage: return kExitUsage;
    case splatseg::ErrorKind::data: return kExitData;
    case splatseg::ErrorKind::numerical: return kExitNumerical;
  }
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian splat segmentation toolkit"};
  app.require_subcommand(1);

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "render a splat to PGM");
  render_cmd->add_option("--splat", render.splat_file, "splat JSON or CSV");
  render_cmd->add_option("--mu-x", render.mu_x);
  render_cmd->add_option("--mu-y", render.mu_y);
  render_cmd->add_option("--s-x", render.s_x);
  render_cmd->add_option("--s-y", render.s_y);
  render_cmd->add_option("--r", render.r, "rotation in radians");
  render_cmd->add_option("--width", render.width)->check(CLI::PositiveNumber);
  render_cmd->add_option("--height", render.height)->check(CLI::PositiveNumber);
  render_cmd->add_option("--mask-sharpness", render.mask_sharpness);
  render_cmd->add_flag("--binary", render.binary);
  render_cmd->add_option("-o,--out", render.out)->required();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a splat (and optionally a level set) to a mask");
  fit_cmd->add_option("--target", fit.target);
  fit_cmd->add_option("--mode", fit.mode)->check(CLI::IsMember({"splat", "dual"}));
  fit_cmd->add_flag("--unlabeled", fit.unlabeled);
  fit_cmd->add_option("--init-splat", fit.init_splat);
  fit_cmd->add_option("--init-lsf", fit.init_lsf_mask, "mask whose signed EDT seeds the level set");
  fit_cmd->add_option("--init-jitter", fit.init_jitter);
  fit_cmd->add_option("--snapshot-every", fit.snapshot_every);
  fit_cmd->add_option("--seed", fit.seed);
  fit_cmd->add_option("--out-dir", fit.out_dir);
  add_training_flags(*fit_cmd, fit.training);

  EdtArgs edt;
  auto* edt_cmd = app.add_subcommand("edt", "signed distance transform of a mask");
  edt_cmd->add_option("--mask", edt.mask)->required();
  edt_cmd->add_option("-o,--out", edt.out)->required();
  edt_cmd->add_option("--sidecar", edt.sidecar);
  edt_cmd->add_option("--soft-out", edt.soft_out);
  edt_cmd->add_option("--k", edt.k);
  edt_cmd->add_option("--sign", edt.sign);
  edt_cmd->add_option("--clip", edt.clip);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "segmentation metrics");
  eval_cmd->add_option("--pred", eval.pred);
  eval_cmd->add_option("--gt", eval.gt);
  eval_cmd->add_option("--scores", eval.scores, "CSV of score,label rows");
  eval_cmd->add_option("--threshold", eval.threshold);
  eval_cmd->add_option("-o,--out", eval.out);
  eval_cmd->add_option("--pr-csv", eval.pr_csv);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "synthetic shape benchmark");
  bench_cmd->add_option("--kinds", bench.kinds)->delimiter(',');
  bench_cmd->add_option("--count", bench.count);
  bench_cmd->add_option("--size", bench.size);
  bench_cmd->add_option("--folds", bench.folds);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--out-dir", bench.out_dir);
  add_training_flags(*bench_cmd, bench.training);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*render_cmd) cmd_render(render);
    else if (*fit_cmd) cmd_fit(fit);
    else if (*edt_cmd) cmd_edt(edt);
    else if (*eval_cmd) cmd_eval(eval);
    else if (*bench_cmd) cmd_bench(bench);
  } catch (const splatseg::Error& e) {
    std::cerr << "splatseg: " << splatseg::to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "splatseg: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
