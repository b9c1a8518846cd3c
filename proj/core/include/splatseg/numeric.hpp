#pragma once

#include <cmath>

namespace splatseg {

// Logistic function, evaluated without overflow for large |x|.
inline double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace splatseg
