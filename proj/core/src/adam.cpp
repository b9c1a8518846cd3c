#include "splatseg/adam.hpp"

#include <cmath>
#include <string>

#include "splatseg/error.hpp"

namespace splatseg {

void AdamConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw UsageError("adam: lr must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw UsageError("adam: beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw UsageError("adam: beta2 must lie in (0, 1)");
  if (!(eps > 0.0)) throw UsageError("adam: eps must be > 0");
  if (!(weight_decay >= 0.0)) throw UsageError("adam: weight_decay must be >= 0");
}

AdamState::AdamState(std::size_t param_count, AdamConfig config)
    : config_(config), m_(param_count, 0.0), v_(param_count, 0.0) {
  config_.validate();
}

void AdamState::set_lr(double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw UsageError("adam: lr must be > 0");
  config_.lr = lr;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  if (params.size() != state.size() || grads.size() != state.size()) {
    throw ShapeMismatchError("adam: state holds " + std::to_string(state.size()) +
                             " parameters, got " + std::to_string(params.size()) +
                             " params and " + std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw PoisonedGradientError("adam: non-finite gradient at index " + std::to_string(i));
    }
  }

  const AdamConfig& c = state.config_;
  const std::int64_t t = ++state.step_;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i] + c.weight_decay * params[i];
    state.m_[i] = c.beta1 * state.m_[i] + (1.0 - c.beta1) * g;
    state.v_[i] = c.beta2 * state.v_[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m_[i] / bias1;
    const double v_hat = state.v_[i] / bias2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace splatseg
