#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "splatseg/error.hpp"
#include "splatseg/levelset.hpp"
#include "splatseg/metrics.hpp"
#include "splatseg/pgm.hpp"
#include "splatseg/serialize.hpp"
#include "splatseg/splat.hpp"
#include "splatseg/synth.hpp"

namespace splatseg::cli {

namespace fs = std::filesystem;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

fs::path resolve_out_dir(const std::optional<fs::path>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return fs::path(env);
  throw UsageError(std::string("an output directory is required (--out-dir or ") + kOutDirEnv +
                   ")");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

json run_config_json(const RunConfig& run) {
  return {{"seed", run.seed},
          {"weights", to_json(run.weights)},
          {"options", to_json(run.options)}};
}

GaussianSplat jitter(const GaussianSplat& splat, double amount, std::uint64_t seed) {
  if (amount == 0.0) return splat;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amount, amount);
  GaussianSplat out = splat;
  out.mu_x += u(rng) * splat.s_x;
  out.mu_y += u(rng) * splat.s_y;
  out.s_x = std::max(splat.s_x * (1.0 + u(rng)), kMinScale);
  out.s_y = std::max(splat.s_y * (1.0 + u(rng)), kMinScale);
  out.r += u(rng);
  return out;
}

std::string epoch_tag(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%05d", epoch);
  return buf;
}

}  // namespace

RunConfig resolve_run_config(const TrainingOverrides& o, std::uint64_t seed,
                             const std::optional<fs::path>& out_dir) {
  json file = json::object();
  if (o.config) file = load_config_file(*o.config);

  RunConfig run;
  run.seed = seed;
  run.weights = loss_weights_from(file);
  run.options = fit_options_from(file);

  LossWeights& w = run.weights;
  if (o.lambda_m) w.lambda_m = *o.lambda_m;
  if (o.lambda_l) w.lambda_l = *o.lambda_l;
  if (o.lambda_dice) w.lambda_dice = *o.lambda_dice;
  if (o.lambda_dtc) w.lambda_dtc = *o.lambda_dtc;
  if (o.k_sigmoid) w.k_sigmoid = *o.k_sigmoid;
  if (o.dtc_sign) w.dtc_sign = *o.dtc_sign;
  w.validate();

  FitOptions& f = run.options;
  if (o.epochs) f.epochs = *o.epochs;
  if (o.lr) f.adam.lr = *o.lr;
  if (o.lsf_lr) f.lsf_lr = *o.lsf_lr;
  if (o.mask_sharpness) f.mask_sharpness = *o.mask_sharpness;
  f.validate();

  run.out_dir = resolve_out_dir(out_dir);
  return run;
}

void cmd_render(const RenderArgs& args) {
  const GaussianSplat splat =
      args.splat_file ? load_splat(*args.splat_file)
                      : GaussianSplat{args.mu_x, args.mu_y, args.s_x, args.s_y, args.r, 1.0};
  const Dims dims{args.width, args.height};
  if (args.binary) {
    write_pgm(threshold(render(splat, dims), 0.5), args.out);
  } else if (args.mask_sharpness) {
    write_pgm(render_mask(splat, dims, *args.mask_sharpness), args.out);
  } else {
    write_pgm(render(splat, dims), args.out);
  }
}

void cmd_fit(const FitArgs& args) {
  if (args.mode != "splat" && args.mode != "dual") {
    throw UsageError("--mode must be 'splat' or 'dual'");
  }
  const bool dual = args.mode == "dual";
  if (args.unlabeled && !dual) throw UsageError("--unlabeled requires --mode dual");
  if (!args.target && !args.unlabeled) throw UsageError("--target is required for labeled fits");
  if (args.unlabeled && !args.init_lsf_mask) {
    throw UsageError("--unlabeled fits need --init-lsf to seed the level-set branch");
  }
  if (args.snapshot_every < 0) throw UsageError("--snapshot-every must be >= 0");

  const RunConfig run = resolve_run_config(args.training, args.seed, args.out_dir);

  std::optional<BinaryMask> target;
  if (args.target) {
    target = read_mask_pgm(*args.target);
    if (!target->has_both_classes()) {
      throw UndefinedBoundaryError("target '" + args.target->string() +
                                   "' has no boundary (single class)");
    }
  }
  std::optional<BinaryMask> lsf_seed;
  if (args.init_lsf_mask) lsf_seed = read_mask_pgm(*args.init_lsf_mask);
  if (target && lsf_seed) require_same_dims(target->dims(), lsf_seed->dims(), "--init-lsf");

  GaussianSplat init;
  if (args.init_splat) {
    init = load_splat(*args.init_splat);
  } else if (target) {
    init = moment_match(*target);
  } else {
    init = moment_match(*lsf_seed);
  }
  init = jitter(init, args.init_jitter, mix_seed(args.seed, 0));

  ensure_dir(run.out_dir);
  const fs::path snapshots = run.out_dir / "snapshots";
  if (args.snapshot_every > 0) ensure_dir(snapshots);
  const Dims dims = target ? target->dims() : lsf_seed->dims();
  const LossWeights weights = run.weights;
  const FitOptions options = run.options;

  FitObserver observer;
  if (args.snapshot_every > 0) {
    observer = [&](int epoch, const GaussianSplat& splat, const LevelSetField* lsf) {
      if (epoch % args.snapshot_every != 0) return;
      const std::string tag = epoch_tag(epoch);
      write_pgm(render_mask(splat, dims, options.mask_sharpness),
                snapshots / (tag + "_splat.pgm"));
      if (lsf) {
        write_pgm(lsf_to_soft_mask(*lsf, weights.k_sigmoid, weights.dtc_sign),
                  snapshots / (tag + "_lsf.pgm"));
      }
    };
  }

  FitResult result;
  if (dual) {
    const LevelSetField init_lsf =
        lsf_seed ? signed_edt(*lsf_seed) : signed_edt(threshold(render(init, dims), 0.5));
    const std::optional<BinaryMask> labels = args.unlabeled ? std::nullopt : target;
    result = fit_dual_task(labels, init, init_lsf, weights, options, observer);
  } else {
    result = fit_splat(*target, init, weights, options, observer);
  }

  json report = {{"mode", args.mode},
                 {"unlabeled", args.unlabeled},
                 {"config", run_config_json(run)},
                 {"init_splat", to_json(init)},
                 {"result", to_json(result)}};
  const BinaryMask recovered = threshold(render(result.splat, dims), 0.5);
  if (target) {
    const ConfusionCounts c = confusion(recovered, *target);
    report["recovered_dice"] = c.tp + c.fp + c.fn == 0 ? 1.0 : dice(c);
  }

  write_text(run.out_dir / "config.json", dump(run_config_json(run)));
  write_text(run.out_dir / "fit.json", dump(report));
  write_pgm(recovered, run.out_dir / "final_mask.pgm");
  if (result.lsf) {
    const UnitMapping mapping = unit_mapping_for(*result.lsf);
    write_pgm(to_unit(*result.lsf, mapping), run.out_dir / "final_lsf.pgm");
    write_text(run.out_dir / "final_lsf.json", dump(to_json(mapping)));
  }
}

void cmd_edt(const EdtArgs& args) {
  const BinaryMask mask = read_mask_pgm(args.mask);
  const LevelSetField lsf = clip_lsf(signed_edt(mask), args.clip);
  const UnitMapping mapping = unit_mapping_for(lsf);
  write_pgm(to_unit(lsf, mapping), args.out);
  const fs::path sidecar = args.sidecar ? *args.sidecar : fs::path(args.out.string() + ".json");
  json record = to_json(mapping);
  record["width"] = lsf.width();
  record["height"] = lsf.height();
  record["units"] = "pixels";
  write_text(sidecar, dump(record));
  if (args.soft_out) write_pgm(lsf_to_soft_mask(lsf, args.k, args.sign), *args.soft_out);
}

namespace {

struct ScoreTable {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

ScoreTable read_scores_csv(const fs::path& path) {
  std::istringstream lines(read_text(path));
  ScoreTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected score,label");
    }
    double score = 0.0;
    int label = 0;
    try {
      std::size_t used = 0;
      const std::string s = line.substr(0, comma);
      score = std::stod(s, &used);
      label = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      if (table.scores.empty() && lineno == 1) continue;  // header row
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": cannot parse row");
    }
    if (label != 0 && label != 1) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": label must be 0 or 1");
    }
    table.scores.push_back(score);
    table.labels.push_back(static_cast<std::uint8_t>(label));
  }
  if (table.scores.empty()) throw DataError(path.string() + ": no score rows");
  return table;
}

}  // namespace

void cmd_eval(const EvalArgs& args) {
  const bool masks = args.pred || args.gt;
  if (masks == args.scores.has_value()) {
    throw UsageError("give either --pred with --gt, or --scores");
  }
  if (masks && !(args.pred && args.gt)) throw UsageError("--pred and --gt go together");

  ScoreTable table;
  if (masks) {
    const ScalarField pred = read_pgm(*args.pred);
    const BinaryMask gt = read_mask_pgm(*args.gt);
    require_same_dims(pred.dims(), gt.dims(), "eval");
    table.scores.assign(pred.values().begin(), pred.values().end());
    table.labels.assign(gt.values().begin(), gt.values().end());
  } else {
    table = read_scores_csv(*args.scores);
  }

  const EvalReport report = evaluate(table.scores, table.labels, args.threshold);
  const std::string text = dump(to_json(report));
  if (args.out) {
    write_text(*args.out, text);
  } else {
    std::cout << text;
  }

  if (args.pr_csv) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "threshold,precision,recall\n";
    for (const PrPoint& p : pr_curve(table.scores, table.labels)) {
      csv << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
    }
    write_text(*args.pr_csv, csv.str());
  }
}

void cmd_bench(const BenchArgs& args) {
  if (args.count < 2) throw UsageError("--count must be >= 2");
  if (args.size < 8) throw UsageError("--size must be >= 8");
  if (args.folds < 2 || args.folds > args.count) {
    throw UsageError("--folds must lie in [2, count]");
  }
  if (args.kinds.empty()) throw UsageError("--kinds needs at least one shape kind");
  std::vector<ShapeKind> kinds;
  for (const std::string& name : args.kinds) kinds.push_back(parse_shape_kind(name));

  const RunConfig run = resolve_run_config(args.training, args.seed, args.out_dir);
  const fs::path dataset = run.out_dir / "dataset";
  ensure_dir(dataset);
  const Dims dims{args.size, args.size};

  json manifest = json::array();
  json per_kind = json::object();
  std::map<ShapeKind, double> means;

  for (ShapeKind kind : kinds) {
    const auto stream_base = static_cast<std::uint64_t>(kind) * 1'000'000ULL;
    json samples = json::array();
    std::vector<double> dices;
    for (int i = 0; i < args.count; ++i) {
      const std::uint64_t sample_seed = mix_seed(args.seed, stream_base + i);
      const GeneratedShape shape = generate(sample_shape(kind, dims, sample_seed), dims);
      const std::string name = std::string(to_string(kind)) + "_" + std::to_string(i) + ".pgm";
      write_pgm(shape.mask, dataset / name);

      json entry = {{"file", name}, {"spec", to_json(shape.spec)}};
      if (!shape.harmonics.empty()) {
        json terms = json::array();
        for (const Harmonic& h : shape.harmonics) {
          terms.push_back({{"order", h.order}, {"amplitude", h.amplitude}, {"phase", h.phase}});
        }
        entry["harmonics"] = terms;
      }
      manifest.push_back(entry);

      const FitResult fit =
          fit_splat(shape.mask, moment_match(shape.mask), run.weights, run.options);
      const double d = dice_score(threshold(render(fit.splat, dims), 0.5), shape.mask);
      dices.push_back(d);
      samples.push_back({{"index", i},
                         {"file", name},
                         {"dice", d},
                         {"epochs_run", fit.epochs_run},
                         {"converged", fit.converged},
                         {"fitted", to_json(fit.splat)}});
    }

    const FoldAssignment folds =
        kfold_split(dices.size(), args.folds, mix_seed(args.seed, stream_base + 999'999));
    json fold_reports = json::array();
    for (int f = 0; f < args.folds; ++f) {
      const auto members = folds.members(f);
      double sum = 0.0;
      for (std::size_t m : members) sum += dices[m];
      fold_reports.push_back({{"fold", f},
                              {"members", members},
                              {"mean_dice", sum / static_cast<double>(members.size())}});
    }
    double total = 0.0;
    for (double d : dices) total += d;
    const double mean = total / static_cast<double>(dices.size());
    means[kind] = mean;
    per_kind[to_string(kind)] = {
        {"mean_dice", mean}, {"folds", fold_reports}, {"samples", samples}};
  }

  json report = {{"config", run_config_json(run)},
                 {"size", args.size},
                 {"count", args.count},
                 {"folds", args.folds},
                 {"kinds", per_kind}};
  if (means.count(ShapeKind::ellipse)) {
    json gaps = json::object();
    for (const auto& [kind, mean] : means) {
      if (kind != ShapeKind::ellipse) gaps[to_string(kind)] = means[ShapeKind::ellipse] - mean;
    }
    report["elliptical_gap"] = gaps;
  }

  write_text(dataset / "manifest.json", dump(manifest));
  write_text(run.out_dir / "config.json", dump(run_config_json(run)));
  write_text(run.out_dir / "bench.json", dump(report));
}

}  // namespace splatseg::cli
