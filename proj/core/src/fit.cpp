#include "splatseg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "splatseg/error.hpp"
#include "splatseg/metrics.hpp"

namespace splatseg {

void FitOptions::validate() const {
  if (epochs < 1) throw UsageError("fit: epochs must be >= 1");
  adam.validate();
  if (!(lsf_lr > 0.0)) throw UsageError("fit: lsf_lr must be > 0");
  if (!(mask_sharpness > 0.0)) throw UsageError("fit: mask_sharpness must be > 0");
  if (plateau_patience < 1) throw UsageError("fit: plateau_patience must be >= 1");
  if (!(plateau_min_delta >= 0.0)) throw UsageError("fit: plateau_min_delta must be >= 0");
  if (!(plateau_decay > 0.0 && plateau_decay < 1.0)) {
    throw UsageError("fit: plateau_decay must lie in (0, 1)");
  }
  if (max_decays < 0) throw UsageError("fit: max_decays must be >= 0");
  if (!(mask_tolerance >= 0.0 && mask_tolerance < 1.0)) {
    throw UsageError("fit: mask_tolerance must lie in [0, 1)");
  }
}

DualTaskObjective::DualTaskObjective(Dims dims, std::optional<BinaryMask> target,
                                     LossWeights weights, double mask_sharpness,
                                     double lsf_clip)
    : dims_(dims), target_(std::move(target)), weights_(weights), sharpness_(mask_sharpness) {
  weights_.validate();
  if (!(sharpness_ > 0.0)) throw UsageError("mask sharpness must be > 0");
  if (target_) {
    require_same_dims(dims_, target_->dims(), "objective target");
    target_field_ = to_field(*target_);
    if (target_->has_both_classes()) target_lsf_ = clip_lsf(signed_edt(*target_), lsf_clip);
  }
}

LossBreakdown DualTaskObjective::evaluate(const GaussianSplat& splat,
                                          const LevelSetField* lsf) const {
  return run(splat, lsf, nullptr);
}

LossBreakdown DualTaskObjective::evaluate(const GaussianSplat& splat, const LevelSetField* lsf,
                                          Gradient& gradient) const {
  return run(splat, lsf, &gradient);
}

LossBreakdown DualTaskObjective::run(const GaussianSplat& splat, const LevelSetField* lsf,
                                     Gradient* gradient) const {
  if (lsf) require_same_dims(dims_, lsf->dims(), "objective level set");
  const ScalarField mask = render_mask(splat, dims_, sharpness_);
  const std::size_t n = dims_.size();

  LossComponents parts;
  std::vector<double> d_mask(n, 0.0);
  std::vector<double> d_lsf;
  if (lsf) d_lsf.assign(n, 0.0);

  const auto accumulate = [](std::vector<double>& into, const ScalarField& g, double w) {
    if (w == 0.0) return;
    for (std::size_t k = 0; k < into.size(); ++k) into[k] += w * g[k];
  };

  if (target_) {
    parts.mask_loss = l2_loss(mask, *target_field_);
    parts.dice_loss = dice_loss(mask, *target_);
    if (gradient) {
      accumulate(d_mask, l2_loss_grad(mask, *target_field_), weights_.lambda_m);
      accumulate(d_mask, dice_loss_grad(mask, *target_), weights_.lambda_dice);
    }
    if (lsf && target_lsf_) {
      parts.lsf_loss = l2_loss(*lsf, *target_lsf_);
      if (gradient) accumulate(d_lsf, l2_loss_grad(*lsf, *target_lsf_), weights_.lambda_l);
    }
  }
  if (lsf) {
    parts.dtc_loss = dtc_loss(*lsf, mask, weights_);
    if (gradient && weights_.lambda_dtc != 0.0) {
      const DtcGradient g = dtc_loss_grad(*lsf, mask, weights_);
      accumulate(d_mask, g.d_mask, weights_.lambda_dtc);
      accumulate(d_lsf, g.d_lsf, weights_.lambda_dtc);
    }
  }

  if (gradient) {
    gradient->splat =
        render_mask_backward(splat, ScalarField(dims_, std::move(d_mask)), sharpness_);
    if (lsf) {
      gradient->lsf = ScalarField(dims_, std::move(d_lsf));
    } else {
      gradient->lsf.reset();
    }
  }
  return total_loss(parts, weights_);
}

GaussianSplat moment_match(const BinaryMask& mask) {
  const std::size_t count = mask.count();
  if (count == 0) throw DegenerateShapeError("moment match: mask has no foreground");
  const Dims dims = mask.dims();
  double sx = 0.0, sy = 0.0;
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      if (!mask.at(i, j)) continue;
      sx += pixel_center(i);
      sy += pixel_center(j);
    }
  }
  const double n = static_cast<double>(count);
  const double cx = sx / n;
  const double cy = sy / n;
  double cxx = 0.0, cxy = 0.0, cyy = 0.0;
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      if (!mask.at(i, j)) continue;
      const double dx = pixel_center(i) - cx;
      const double dy = pixel_center(j) - cy;
      cxx += dx * dx;
      cxy += dx * dy;
      cyy += dy * dy;
    }
  }
  // Each pixel is a unit square, which adds 1/12 of variance per axis.
  cxx = cxx / n + 1.0 / 12.0;
  cyy = cyy / n + 1.0 / 12.0;
  cxy /= n;

  const double r = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
  const double mean = 0.5 * (cxx + cyy);
  const double spread = std::hypot(0.5 * (cxx - cyy), cxy);
  const double major = mean + spread;
  const double minor = std::max(mean - spread, 0.0);
  // Uniform ellipse: variance along a semi-axis a is a^2 / 4, and the 0.5
  // contour of a splat sits at a = s sqrt(2 ln 2), so s^2 = 2 var / ln 2.
  const auto scale = [](double var) {
    return std::max(std::sqrt(2.0 * var / std::numbers::ln2), kMinScale);
  };
  return {cx, cy, scale(major), scale(minor), r, 1.0};
}

double branch_agreement(const GaussianSplat& splat, const LevelSetField& lsf,
                        const LossWeights& weights) {
  const BinaryMask a = threshold(render(splat, lsf.dims()), 0.5);
  const BinaryMask b = threshold(lsf_to_soft_mask(lsf, weights.k_sigmoid, weights.dtc_sign), 0.5);
  const ConfusionCounts c = confusion(a, b);
  if (c.tp + c.fp + c.fn == 0) return 1.0;  // both empty
  return dice(c);
}

namespace {

void project_scales(std::array<double, kSplatParamCount>& p) {
  p[2] = std::max(p[2], kMinScale);
  p[3] = std::max(p[3], kMinScale);
}

double mask_error(const BinaryMask& pred, const BinaryMask& target) {
  const ConfusionCounts c = confusion(pred, target);
  if (c.tp + c.fp + c.fn == 0) return 0.0;
  return 1.0 - dice(c);
}

// Worst hard-mask error over the branches present.
double hard_error(const GaussianSplat& splat, const LevelSetField* lsf, const BinaryMask& target,
                  const LossWeights& weights) {
  double err = mask_error(threshold(render(splat, target.dims()), 0.5), target);
  if (lsf) {
    const BinaryMask level = threshold(lsf_to_soft_mask(*lsf, weights.k_sigmoid, weights.dtc_sign));
    err = std::max(err, mask_error(level, target));
  }
  return err;
}

// Reduce-on-plateau bookkeeping shared by both fits.
class PlateauTracker {
 public:
  explicit PlateauTracker(const FitOptions& options) : options_(options) {}

  enum class Action { keep, decay, stop };

  Action observe(double loss) {
    if (loss < best_ - options_.plateau_min_delta) {
      best_ = loss;
      waited_ = 0;
      return Action::keep;
    }
    if (++waited_ < options_.plateau_patience) return Action::keep;
    waited_ = 0;
    if (decays_ >= options_.max_decays) return Action::stop;
    ++decays_;
    return Action::decay;
  }

 private:
  const FitOptions& options_;
  double best_ = std::numeric_limits<double>::infinity();
  int waited_ = 0;
  int decays_ = 0;
};

FitResult run_fit(const DualTaskObjective& base, const GaussianSplat& init_splat,
                  const std::optional<LevelSetField>& init_lsf, const FitOptions& options,
                  const FitObserver& observer) {
  options.validate();
  validate(init_splat);

  DualTaskObjective objective = base;
  const double lambda_max = base.weights().lambda_dtc;
  const int last_epoch = options.epochs - 1;
  const Dims dims = base.dims();

  std::array<double, kSplatParamCount> splat_params = init_splat.params();
  const double amplitude = init_splat.amplitude;
  std::vector<double> lsf_params;
  if (init_lsf) lsf_params.assign(init_lsf->values().begin(), init_lsf->values().end());

  AdamState splat_adam(kSplatParamCount, options.adam);
  AdamConfig lsf_config = options.adam;
  lsf_config.lr = options.lsf_lr;
  AdamState lsf_adam(lsf_params.size(), lsf_config);

  FitResult result;
  PlateauTracker plateau(options);
  const bool dual = init_lsf.has_value();

  if (dual) {
    result.initial_agreement =
        branch_agreement(init_splat, *init_lsf, base.weights());
  }

  for (int epoch = 0; epoch <= last_epoch; ++epoch) {
    const GaussianSplat splat = GaussianSplat::from_params(splat_params, amplitude);
    std::optional<LevelSetField> lsf;
    if (dual) lsf = ScalarField(dims, lsf_params);
    const LevelSetField* lsf_ptr = lsf ? &*lsf : nullptr;

    if (observer) observer(epoch, splat, lsf_ptr);

    // The trace uses the un-ramped objective so that epochs are comparable.
    const LossBreakdown reported = base.evaluate(splat, lsf_ptr);
    result.loss_trace.push_back(reported.total);
    if (dual) result.dtc_trace.push_back(reported.dtc_loss);
    result.final_breakdown = reported;
    result.epochs_run = epoch + 1;
    result.splat = splat;
    if (dual) result.lsf = lsf;

    if (base.target() && hard_error(splat, lsf_ptr, *base.target(), base.weights()) <=
                             options.mask_tolerance) {
      result.converged = true;
      break;
    }
    const auto action = plateau.observe(reported.total);
    if (action == PlateauTracker::Action::stop) {
      result.converged = true;
      break;
    }
    if (epoch == last_epoch) break;
    if (action == PlateauTracker::Action::decay) {
      splat_adam.set_lr(splat_adam.lr() * options.plateau_decay);
      if (dual) lsf_adam.set_lr(lsf_adam.lr() * options.plateau_decay);
    }

    if (dual) {
      objective.set_lambda_dtc(options.ramp_dtc ? dtc_schedule(epoch, last_epoch, lambda_max)
                                                : lambda_max);
    }
    DualTaskObjective::Gradient grad;
    objective.evaluate(splat, lsf_ptr, grad);
    const auto g = grad.splat.values();
    adam_step(splat_adam, splat_params, g);
    project_scales(splat_params);
    if (dual) adam_step(lsf_adam, lsf_params, grad.lsf->values());
  }

  if (dual) result.final_agreement = branch_agreement(result.splat, *result.lsf, base.weights());
  return result;
}

}  // namespace

FitResult fit_splat(const BinaryMask& target, const GaussianSplat& init,
                    const LossWeights& weights, const FitOptions& options,
                    const FitObserver& observer) {
  if (!target.has_both_classes()) {
    throw UndefinedBoundaryError("fit target must contain both foreground and background");
  }
  const DualTaskObjective objective(target.dims(), target, weights, options.mask_sharpness,
                                    options.lsf_clip);
  return run_fit(objective, init, std::nullopt, options, observer);
}

FitResult fit_dual_task(const std::optional<BinaryMask>& target, const GaussianSplat& init_splat,
                        const LevelSetField& init_lsf, const LossWeights& weights,
                        const FitOptions& options, const FitObserver& observer) {
  if (target) {
    if (!target->has_both_classes()) {
      throw UndefinedBoundaryError("fit target must contain both foreground and background");
    }
    require_same_dims(target->dims(), init_lsf.dims(), "dual-task fit");
  }
  const DualTaskObjective objective(init_lsf.dims(), target, weights, options.mask_sharpness,
                                    options.lsf_clip);
  return run_fit(objective, init_splat, init_lsf, options, observer);
}

}  // namespace splatseg
