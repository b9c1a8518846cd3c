#include "splatseg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splatseg/error.hpp"
#include "splatseg/numeric.hpp"

namespace splatseg {

void LossWeights::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw UsageError(std::string("invalid loss weight: ") + what);
  };
  require(lambda_m >= 0.0 && std::isfinite(lambda_m), "lambda_m must be >= 0");
  require(lambda_l >= 0.0 && std::isfinite(lambda_l), "lambda_l must be >= 0");
  require(lambda_dice >= 0.0 && std::isfinite(lambda_dice), "lambda_dice must be >= 0");
  require(lambda_dtc >= 0.0 && std::isfinite(lambda_dtc), "lambda_dtc must be >= 0");
  require(focal_gamma >= 0.0 && std::isfinite(focal_gamma), "focal_gamma must be >= 0");
  require(focal_alpha > 0.0 && focal_alpha < 1.0, "focal_alpha must lie in (0, 1)");
  require(k_sigmoid > 0.0 && std::isfinite(k_sigmoid), "k_sigmoid must be > 0");
  require(dtc_sign == 1.0 || dtc_sign == -1.0, "dtc_sign must be +1 or -1");
}

namespace {

void check_focal_inputs(std::span<const double> p, std::span<const double> y) {
  if (p.size() != y.size()) {
    throw ShapeMismatchError("focal loss: " + std::to_string(p.size()) +
                             " probabilities vs " + std::to_string(y.size()) + " labels");
  }
  for (double label : y) {
    if (label != 0.0 && label != 1.0) throw UsageError("focal loss: labels must be 0 or 1");
  }
  for (double prob : p) {
    if (!std::isfinite(prob)) throw NumericalError("focal loss: non-finite probability");
  }
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

}  // namespace

double focal_loss(std::span<const double> p, std::span<const double> y, double gamma,
                  double alpha) {
  check_focal_inputs(p, y);
  std::vector<double> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = clamp_probability(p[i]);
    const double pos = y[i] * std::log(pi) * std::pow(1.0 - pi, gamma) * alpha;
    const double neg = (1.0 - y[i]) * std::log(1.0 - pi) * std::pow(pi, gamma) * (1.0 - alpha);
    terms[i] = -(pos + neg);
  }
  return pairwise_sum(terms);
}

std::vector<double> focal_loss_grad(std::span<const double> p, std::span<const double> y,
                                    double gamma, double alpha) {
  check_focal_inputs(p, y);
  std::vector<double> grad(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    // The clamp is flat outside its range.
    if (p[i] < kProbabilityClamp || p[i] > 1.0 - kProbabilityClamp) continue;
    const double pi = p[i];
    const double q = 1.0 - pi;
    double d_pos = std::pow(q, gamma) / pi;
    double d_neg = -std::pow(pi, gamma) / q;
    if (gamma != 0.0) {
      d_pos -= gamma * std::pow(q, gamma - 1.0) * std::log(pi);
      d_neg += gamma * std::pow(pi, gamma - 1.0) * std::log(q);
    }
    grad[i] = -(y[i] * alpha * d_pos + (1.0 - y[i]) * (1.0 - alpha) * d_neg);
  }
  return grad;
}

namespace {

void check_unit_interval(const ScalarField& x, const char* what) {
  for (double v : x.values()) {
    if (v < 0.0 || v > 1.0) throw UsageError(std::string(what) + ": values must lie in [0, 1]");
  }
}

struct DiceSums {
  double intersection;
  double denominator;
};

DiceSums dice_sums(const ScalarField& x, const BinaryMask& y) {
  std::vector<double> xy(x.size());
  std::vector<double> sum(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    xy[k] = y[k] ? x[k] : 0.0;
    sum[k] = x[k] + (y[k] ? 1.0 : 0.0);
  }
  return {pairwise_sum(xy), pairwise_sum(sum)};
}

}  // namespace

double dice_loss(const ScalarField& x, const BinaryMask& y) {
  require_same_dims(x.dims(), y.dims(), "dice loss");
  check_unit_interval(x, "dice loss");
  const auto [inter, denom] = dice_sums(x, y);
  return 1.0 - (2.0 * inter + kDiceSmoothing) / (denom + kDiceSmoothing);
}

ScalarField dice_loss_grad(const ScalarField& x, const BinaryMask& y) {
  require_same_dims(x.dims(), y.dims(), "dice loss");
  check_unit_interval(x, "dice loss");
  const auto [inter, denom] = dice_sums(x, y);
  const double num = 2.0 * inter + kDiceSmoothing;
  const double den = denom + kDiceSmoothing;
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d_num = y[k] ? 2.0 : 0.0;
    grad[k] = -(d_num * den - num) / (den * den);
  }
  return ScalarField(x.dims(), std::move(grad));
}

double l2_loss(const ScalarField& a, const ScalarField& b) {
  require_same_dims(a.dims(), b.dims(), "l2 loss");
  std::vector<double> sq(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq[k] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(a.size());
}

ScalarField l2_loss_grad(const ScalarField& a, const ScalarField& b) {
  require_same_dims(a.dims(), b.dims(), "l2 loss");
  const double scale = 2.0 / static_cast<double>(a.size());
  std::vector<double> grad(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) grad[k] = scale * (a[k] - b[k]);
  return ScalarField(a.dims(), std::move(grad));
}

double dtc_loss(const LevelSetField& lsf, const ScalarField& mask_pred,
                const LossWeights& weights) {
  require_same_dims(lsf.dims(), mask_pred.dims(), "dtc loss");
  return l2_loss(lsf_to_soft_mask(lsf, weights.k_sigmoid, weights.dtc_sign), mask_pred);
}

DtcGradient dtc_loss_grad(const LevelSetField& lsf, const ScalarField& mask_pred,
                          const LossWeights& weights) {
  require_same_dims(lsf.dims(), mask_pred.dims(), "dtc loss");
  const ScalarField soft = lsf_to_soft_mask(lsf, weights.k_sigmoid, weights.dtc_sign);
  const ScalarField d_soft = l2_loss_grad(soft, mask_pred);
  const double slope = weights.dtc_sign * weights.k_sigmoid;
  std::vector<double> d_lsf(lsf.size());
  std::vector<double> d_mask(lsf.size());
  for (std::size_t k = 0; k < lsf.size(); ++k) {
    d_lsf[k] = d_soft[k] * slope * soft[k] * (1.0 - soft[k]);
    d_mask[k] = -d_soft[k];
  }
  return {ScalarField(lsf.dims(), std::move(d_lsf)),
          ScalarField(lsf.dims(), std::move(d_mask))};
}

LossBreakdown total_loss(const LossComponents& c, const LossWeights& w) {
  const double parts[] = {c.class_loss, c.mask_loss, c.lsf_loss, c.dtc_loss, c.dice_loss};
  for (double v : parts) {
    if (!std::isfinite(v)) throw NumericalError("total loss: non-finite component");
  }
  LossBreakdown out{c.class_loss, c.mask_loss, c.lsf_loss, c.dtc_loss, c.dice_loss, 0.0};
  out.total = c.class_loss + w.lambda_m * c.mask_loss + w.lambda_l * c.lsf_loss +
              w.lambda_dtc * c.dtc_loss + w.lambda_dice * c.dice_loss;
  return out;
}

double dtc_schedule(int epoch, int total_epochs, double lambda_max) {
  if (epoch < 0 || total_epochs < 0 || epoch > total_epochs) {
    throw UsageError("dtc schedule: epoch must lie in [0, total_epochs]");
  }
  if (epoch == 0) return 0.0;
  const double t = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  const double gap = 1.0 - t;
  return lambda_max * std::exp(-5.0 * gap * gap);
}

}  // namespace splatseg
