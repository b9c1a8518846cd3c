#include "splatseg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splatseg/error.hpp"

namespace splatseg {

GradientCheckResult gradient_check(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> analytic,
                                   std::span<const double> point, double h) {
  if (analytic.size() != point.size()) {
    throw ShapeMismatchError("gradient check: gradient and point lengths differ");
  }
  if (!(h > 0.0)) throw UsageError("gradient check: step must be > 0");

  GradientCheckResult result;
  result.numerical.resize(point.size());
  std::vector<double> x(point.begin(), point.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double plus = f(x);
    x[i] = saved - h;
    const double minus = f(x);
    x[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NumericalError("gradient check: non-finite evaluation at coordinate " +
                           std::to_string(i));
    }
    const double numeric = (plus - minus) / (2.0 * h);
    result.numerical[i] = numeric;
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    const double err = std::abs(analytic[i] - numeric) / scale;
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace splatseg
