#pragma once

#include <array>

#include "splatseg/grid.hpp"

namespace splatseg {

// Smallest admissible scale, in pixels. Fitting projects scales onto it.
inline constexpr double kMinScale = 1e-3;

inline constexpr std::size_t kSplatParamCount = 5;

// One elliptical 2D Gaussian. Rotation is unnormalized; any real is valid.
//
// `amplitude` is a peak multiplier reserved for an eventual sixth feature.
// It defaults to 1, must lie in (0, 1], and is never optimized.
struct GaussianSplat {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double s_x = 1.0;
  double s_y = 1.0;
  double r = 0.0;
  double amplitude = 1.0;

  // Parameter order (mu_x, mu_y, s_x, s_y, r) is used by every flat
  // parameter vector in the library.
  std::array<double, kSplatParamCount> params() const noexcept {
    return {mu_x, mu_y, s_x, s_y, r};
  }
  static GaussianSplat from_params(const std::array<double, kSplatParamCount>& p,
                                   double amplitude = 1.0) noexcept {
    return {p[0], p[1], p[2], p[3], p[4], amplitude};
  }

  friend bool operator==(const GaussianSplat&, const GaussianSplat&) = default;
};

struct SplatGradient {
  double d_mu_x = 0.0;
  double d_mu_y = 0.0;
  double d_s_x = 0.0;
  double d_s_y = 0.0;
  double d_r = 0.0;

  std::array<double, kSplatParamCount> values() const noexcept {
    return {d_mu_x, d_mu_y, d_s_x, d_s_y, d_r};
  }
};

// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const noexcept { return xx * yy - xy * xy; }
};

// Throws DegenerateScaleError if a scale is below kMinScale (or non-finite)
// and UsageError for a non-finite center/rotation or bad amplitude.
void validate(const GaussianSplat& splat);

// Sigma = R diag(s_x^2, s_y^2) R^T.
Covariance2 build_covariance(const GaussianSplat& splat);

// G(x, y) = amplitude * exp(-1/2 d^T Sigma^-1 d), sampled at pixel centers.
ScalarField render(const GaussianSplat& splat, Dims dims);

// Gradient of sum_k upstream[k] * render(splat)[k] with respect to the five
// geometric parameters. Per-pixel terms are reduced pairwise, so the result
// is bit-reproducible.
SplatGradient render_backward(const GaussianSplat& splat, const ScalarField& upstream);

// Soft mask used by the fitting code: M = sigmoid(sharpness * (G - 0.5)).
// Its 0.5 level set coincides with threshold(render(splat), 0.5).
ScalarField render_mask(const GaussianSplat& splat, Dims dims, double sharpness);
SplatGradient render_mask_backward(const GaussianSplat& splat, const ScalarField& upstream,
                                   double sharpness);

}  // namespace splatseg
