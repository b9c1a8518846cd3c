#pragma once

#include <functional>
#include <span>
#include <vector>

namespace splatseg {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> numerical;
};

// Compares an analytic gradient with central differences
// (f(x + h e_i) - f(x - h e_i)) / 2h. Per coordinate the error is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// Throws NumericalError if f returns a non-finite value.
GradientCheckResult gradient_check(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> analytic,
                                   std::span<const double> point, double h = 1e-4);

}  // namespace splatseg
