#pragma once

#include <span>
#include <vector>

#include "splatseg/grid.hpp"
#include "splatseg/levelset.hpp"

namespace splatseg {

struct LossWeights {
  double lambda_m = 0.25;
  double lambda_l = 0.5;
  double lambda_dice = 0.5;
  // Current DTC weight. Fitting treats it as the ramp maximum and feeds
  // dtc_schedule() back in per epoch.
  double lambda_dtc = 0.1;
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;
  double k_sigmoid = kDefaultSteepness;
  // -1: M' = sigmoid(-k L) (interior -> 1). +1: literal sigmoid(k L).
  double dtc_sign = -1.0;

  // Throws UsageError if a field is out of range.
  void validate() const;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct LossComponents {
  double class_loss = 0.0;
  double mask_loss = 0.0;
  double lsf_loss = 0.0;
  double dtc_loss = 0.0;
  double dice_loss = 0.0;
};

struct LossBreakdown {
  double class_loss = 0.0;
  double mask_loss = 0.0;
  double lsf_loss = 0.0;
  double dtc_loss = 0.0;
  double dice_loss = 0.0;
  double total = 0.0;
};

inline constexpr double kProbabilityClamp = 1e-7;
inline constexpr double kDiceSmoothing = 1e-6;

// -sum_i [ y_i log(p_i) (1 - p_i)^gamma alpha
//          + (1 - y_i) log(1 - p_i) p_i^gamma (1 - alpha) ]
// with p clamped to [1e-7, 1 - 1e-7]. Labels must be 0 or 1.
double focal_loss(std::span<const double> p, std::span<const double> y, double gamma,
                  double alpha);
std::vector<double> focal_loss_grad(std::span<const double> p, std::span<const double> y,
                                    double gamma, double alpha);

// Soft dice: 1 - (2 sum(x y) + eps) / (sum(x) + sum(y) + eps).
double dice_loss(const ScalarField& x, const BinaryMask& y);
ScalarField dice_loss_grad(const ScalarField& x, const BinaryMask& y);

// Mean squared error.
double l2_loss(const ScalarField& a, const ScalarField& b);
// d l2_loss / d a.
ScalarField l2_loss_grad(const ScalarField& a, const ScalarField& b);

// l2_loss(lsf_to_soft_mask(lsf, k, sign), mask_pred).
double dtc_loss(const LevelSetField& lsf, const ScalarField& mask_pred,
                const LossWeights& weights);

struct DtcGradient {
  ScalarField d_lsf;
  ScalarField d_mask;
};
DtcGradient dtc_loss_grad(const LevelSetField& lsf, const ScalarField& mask_pred,
                          const LossWeights& weights);

LossBreakdown total_loss(const LossComponents& components, const LossWeights& weights);

// lambda_max * exp(-5 (1 - t)^2), t = epoch / total_epochs, pinned to 0 at
// epoch 0.
double dtc_schedule(int epoch, int total_epochs, double lambda_max);

}  // namespace splatseg
