#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "splatseg/augment.hpp"
#include "splatseg/fit.hpp"
#include "splatseg/loss.hpp"

namespace splatseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Output directories may be overridden by this variable when no flag is given.
inline constexpr const char* kOutDirEnv = "SPLATSEG_OUT_DIR";

// Flag-level overrides shared by fit and bench. Unset values fall through to
// the config file, then to the built-in defaults.
struct TrainingOverrides {
  std::optional<std::filesystem::path> config;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<double> lsf_lr;
  std::optional<double> mask_sharpness;
  std::optional<double> lambda_m;
  std::optional<double> lambda_l;
  std::optional<double> lambda_dice;
  std::optional<double> lambda_dtc;
  std::optional<double> k_sigmoid;
  std::optional<double> dtc_sign;
};

struct RunConfig {
  LossWeights weights;
  FitOptions options;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

RunConfig resolve_run_config(const TrainingOverrides& overrides, std::uint64_t seed,
                             const std::optional<std::filesystem::path>& out_dir);

struct RenderArgs {
  std::optional<std::filesystem::path> splat_file;
  double mu_x = 16.0;
  double mu_y = 16.0;
  double s_x = 4.0;
  double s_y = 4.0;
  double r = 0.0;
  int width = 32;
  int height = 32;
  std::optional<double> mask_sharpness;  // render the soft mask instead of G
  bool binary = false;                   // write threshold(G, 0.5)
  std::filesystem::path out;
};

struct FitArgs {
  std::optional<std::filesystem::path> target;
  std::string mode = "splat";
  bool unlabeled = false;
  std::optional<std::filesystem::path> init_splat;
  std::optional<std::filesystem::path> init_lsf_mask;
  double init_jitter = 0.0;
  int snapshot_every = 0;
  TrainingOverrides training;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_dir;
};

struct EdtArgs {
  std::filesystem::path mask;
  std::filesystem::path out;
  std::optional<std::filesystem::path> sidecar;
  std::optional<std::filesystem::path> soft_out;
  double k = kDefaultSteepness;
  double sign = -1.0;
  double clip = 0.0;
};

struct EvalArgs {
  std::optional<std::filesystem::path> pred;
  std::optional<std::filesystem::path> gt;
  std::optional<std::filesystem::path> scores;
  double threshold = 0.5;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> pr_csv;
};

struct BenchArgs {
  std::vector<std::string> kinds{"ellipse", "crescent", "blob"};
  int count = 20;
  int size = 64;
  int folds = 5;
  TrainingOverrides training;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_dir;
};

// Each command throws splatseg::Error on failure; main() maps the kind onto
// an exit code.
void cmd_render(const RenderArgs& args);
void cmd_fit(const FitArgs& args);
void cmd_edt(const EdtArgs& args);
void cmd_eval(const EvalArgs& args);
void cmd_bench(const BenchArgs& args);

// splitmix64 step; derives independent per-sample seeds from a run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace splatseg::cli
