#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace splatseg {

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;

  void validate() const;
};

// Bias-corrected Adam with L2-style weight decay folded into the gradient.
class AdamState {
 public:
  AdamState(std::size_t param_count, AdamConfig config = {});

  std::size_t size() const noexcept { return m_.size(); }
  std::int64_t step() const noexcept { return step_; }
  const AdamConfig& config() const noexcept { return config_; }
  double lr() const noexcept { return config_.lr; }
  void set_lr(double lr);

  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

 private:
  friend void adam_step(AdamState&, std::span<double>, std::span<const double>);

  AdamConfig config_;
  std::int64_t step_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// Applies one update in place. Throws ShapeMismatchError on a length mismatch
// and PoisonedGradientError on a non-finite gradient; neither the state nor
// the parameters change when it throws.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace splatseg
