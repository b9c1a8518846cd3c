#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "splatseg/adam.hpp"
#include "splatseg/grid.hpp"
#include "splatseg/levelset.hpp"
#include "splatseg/loss.hpp"
#include "splatseg/splat.hpp"

namespace splatseg {

inline constexpr double kDefaultMaskSharpness = 40.0;

struct FitOptions {
  int epochs = 400;
  // Splat parameters.
  AdamConfig adam{};
  // Per-pixel level-set parameters, which live on a pixel-distance scale.
  double lsf_lr = 0.1;
  double mask_sharpness = kDefaultMaskSharpness;
  // Reduce-on-plateau: after `plateau_patience` epochs without an improvement
  // larger than `plateau_min_delta`, multiply every learning rate by
  // `plateau_decay`. A plateau reached after `max_decays` reductions ends
  // the fit as converged.
  int plateau_patience = 25;
  double plateau_min_delta = 1e-4;
  double plateau_decay = 0.5;
  int max_decays = 2;
  // Labeled fits end as converged once the hard-mask error
  // 1 - Dice(threshold(M), target) is at or below this; the level-set branch
  // of a dual-task fit must meet it too. The soft loss itself is never zero
  // for a binary target, so it can't serve as the stopping rule.
  double mask_tolerance = 0.0;
  // Clip radius for the level-set target; <= 0 disables clipping.
  double lsf_clip = 0.0;
  // When false, lambda_dtc is used as-is every epoch instead of being ramped.
  bool ramp_dtc = true;

  void validate() const;
};

// Evaluated l_TOTAL for a splat branch and an optional level-set branch.
// Without a target only the consistency term is active; without a level set
// the lsf and consistency terms are absent.
class DualTaskObjective {
 public:
  DualTaskObjective(Dims dims, std::optional<BinaryMask> target, LossWeights weights,
                    double mask_sharpness = kDefaultMaskSharpness, double lsf_clip = 0.0);

  struct Gradient {
    SplatGradient splat;
    std::optional<ScalarField> lsf;
  };

  LossBreakdown evaluate(const GaussianSplat& splat, const LevelSetField* lsf) const;
  LossBreakdown evaluate(const GaussianSplat& splat, const LevelSetField* lsf,
                         Gradient& gradient) const;

  Dims dims() const noexcept { return dims_; }
  const LossWeights& weights() const noexcept { return weights_; }
  void set_lambda_dtc(double lambda) noexcept { weights_.lambda_dtc = lambda; }
  const std::optional<BinaryMask>& target() const noexcept { return target_; }

 private:
  LossBreakdown run(const GaussianSplat& splat, const LevelSetField* lsf,
                    Gradient* gradient) const;

  Dims dims_;
  std::optional<BinaryMask> target_;
  std::optional<ScalarField> target_field_;
  std::optional<LevelSetField> target_lsf_;
  LossWeights weights_;
  double sharpness_;
};

struct FitResult {
  GaussianSplat splat;
  std::optional<LevelSetField> lsf;
  // Total loss per epoch, evaluated with the final (un-ramped) weights so
  // entries are comparable across epochs.
  std::vector<double> loss_trace;
  // Raw consistency loss per epoch (dual-task fits only).
  std::vector<double> dtc_trace;
  int epochs_run = 0;
  bool converged = false;
  LossBreakdown final_breakdown;
  // Dice(threshold(M), threshold(M')) before and after (dual-task fits only).
  std::optional<double> initial_agreement;
  std::optional<double> final_agreement;
};

using FitObserver =
    std::function<void(int epoch, const GaussianSplat& splat, const LevelSetField* lsf)>;

// Closed-form initial splat from a mask: centroid, principal axis of the
// second-moment matrix, and scales chosen so that the splat's 0.5 contour
// encloses a uniform ellipse with the same second moments.
// Throws DegenerateShapeError for an empty mask.
GaussianSplat moment_match(const BinaryMask& mask);

// Fits the five splat parameters to a target mask by minimizing
// lambda_dice * Dice(M, target) + lambda_m * L2(M, target).
// Throws UndefinedBoundaryError if the target lacks either class.
FitResult fit_splat(const BinaryMask& target, const GaussianSplat& init,
                    const LossWeights& weights, const FitOptions& options = {},
                    const FitObserver& observer = {});

// Jointly fits a splat branch and a free per-pixel level-set branch, coupled
// by the consistency loss with lambda_dtc ramped by dtc_schedule().
FitResult fit_dual_task(const std::optional<BinaryMask>& target, const GaussianSplat& init_splat,
                        const LevelSetField& init_lsf, const LossWeights& weights,
                        const FitOptions& options = {}, const FitObserver& observer = {});

// Dice between the thresholded splat mask and the thresholded level-set mask.
double branch_agreement(const GaussianSplat& splat, const LevelSetField& lsf,
                        const LossWeights& weights);

}  // namespace splatseg
