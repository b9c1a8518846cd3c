#include "splatseg/splat.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "splatseg/error.hpp"
#include "splatseg/numeric.hpp"

namespace splatseg {

void validate(const GaussianSplat& splat) {
  if (!std::isfinite(splat.mu_x) || !std::isfinite(splat.mu_y) || !std::isfinite(splat.r)) {
    throw UsageError("splat center and rotation must be finite");
  }
  if (!(splat.s_x >= kMinScale) || !(splat.s_y >= kMinScale) || !std::isfinite(splat.s_x) ||
      !std::isfinite(splat.s_y)) {
    throw DegenerateScaleError("degenerate splat scale (s_x=" + std::to_string(splat.s_x) +
                               ", s_y=" + std::to_string(splat.s_y) + "); scales must be >= " +
                               std::to_string(kMinScale));
  }
  if (!(splat.amplitude > 0.0 && splat.amplitude <= 1.0)) {
    throw UsageError("splat amplitude must lie in (0, 1]");
  }
}

Covariance2 build_covariance(const GaussianSplat& splat) {
  validate(splat);
  const double c = std::cos(splat.r);
  const double s = std::sin(splat.r);
  const double a = splat.s_x * splat.s_x;
  const double b = splat.s_y * splat.s_y;
  return {c * c * a + s * s * b, c * s * (a - b), s * s * a + c * c * b};
}

namespace {

// Per-pixel evaluation in the splat's local frame: (u, v) = R^T d.
struct LocalFrame {
  double cos_r;
  double sin_r;
  double inv_sx2;
  double inv_sy2;

  explicit LocalFrame(const GaussianSplat& splat)
      : cos_r(std::cos(splat.r)),
        sin_r(std::sin(splat.r)),
        inv_sx2(1.0 / (splat.s_x * splat.s_x)),
        inv_sy2(1.0 / (splat.s_y * splat.s_y)) {}
};

}  // namespace

ScalarField render(const GaussianSplat& splat, Dims dims) {
  validate(splat);
  if (dims.width < 1 || dims.height < 1) throw UsageError("render dimensions must be >= 1");
  const LocalFrame frame(splat);
  std::vector<double> out(dims.size());
  for (int j = 0; j < dims.height; ++j) {
    const double dy = pixel_center(j) - splat.mu_y;
    for (int i = 0; i < dims.width; ++i) {
      const double dx = pixel_center(i) - splat.mu_x;
      const double u = frame.cos_r * dx + frame.sin_r * dy;
      const double v = -frame.sin_r * dx + frame.cos_r * dy;
      const double q = u * u * frame.inv_sx2 + v * v * frame.inv_sy2;
      out[dims.index(i, j)] = splat.amplitude * std::exp(-0.5 * q);
    }
  }
  return ScalarField(dims, std::move(out));
}

SplatGradient render_backward(const GaussianSplat& splat, const ScalarField& upstream) {
  validate(splat);
  const Dims dims = upstream.dims();
  const LocalFrame frame(splat);
  const std::size_t n = dims.size();
  std::array<std::vector<double>, kSplatParamCount> terms;
  for (auto& t : terms) t.assign(n, 0.0);

  const double inv_sx3 = frame.inv_sx2 / splat.s_x;
  const double inv_sy3 = frame.inv_sy2 / splat.s_y;
  const double aniso = frame.inv_sx2 - frame.inv_sy2;

  for (int j = 0; j < dims.height; ++j) {
    const double dy = pixel_center(j) - splat.mu_y;
    for (int i = 0; i < dims.width; ++i) {
      const std::size_t k = dims.index(i, j);
      const double up = upstream[k];
      if (up == 0.0) continue;
      const double dx = pixel_center(i) - splat.mu_x;
      const double u = frame.cos_r * dx + frame.sin_r * dy;
      const double v = -frame.sin_r * dx + frame.cos_r * dy;
      const double q = u * u * frame.inv_sx2 + v * v * frame.inv_sy2;
      const double g = splat.amplitude * std::exp(-0.5 * q);
      // dG/dtheta = -G/2 * dq/dtheta
      const double w = -0.5 * g * up;
      const double dq_du = 2.0 * u * frame.inv_sx2;
      const double dq_dv = 2.0 * v * frame.inv_sy2;
      // du/dmu_x = -cos, dv/dmu_x = sin; du/dmu_y = -sin, dv/dmu_y = -cos
      terms[0][k] = w * (-frame.cos_r * dq_du + frame.sin_r * dq_dv);
      terms[1][k] = w * (-frame.sin_r * dq_du - frame.cos_r * dq_dv);
      terms[2][k] = w * (-2.0 * u * u * inv_sx3);
      terms[3][k] = w * (-2.0 * v * v * inv_sy3);
      // du/dr = v, dv/dr = -u
      terms[4][k] = w * (2.0 * u * v * aniso);
    }
  }
  return {pairwise_sum(terms[0]), pairwise_sum(terms[1]), pairwise_sum(terms[2]),
          pairwise_sum(terms[3]), pairwise_sum(terms[4])};
}

ScalarField render_mask(const GaussianSplat& splat, Dims dims, double sharpness) {
  if (!(sharpness > 0.0)) throw UsageError("mask sharpness must be > 0");
  const ScalarField g = render(splat, dims);
  std::vector<double> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = sigmoid(sharpness * (g[k] - 0.5));
  return ScalarField(dims, std::move(out));
}

SplatGradient render_mask_backward(const GaussianSplat& splat, const ScalarField& upstream,
                                   double sharpness) {
  if (!(sharpness > 0.0)) throw UsageError("mask sharpness must be > 0");
  const ScalarField g = render(splat, upstream.dims());
  std::vector<double> chained(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double m = sigmoid(sharpness * (g[k] - 0.5));
    chained[k] = upstream[k] * sharpness * m * (1.0 - m);
  }
  return render_backward(splat, ScalarField(upstream.dims(), std::move(chained)));
}

}  // namespace splatseg
