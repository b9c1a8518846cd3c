#include "splatseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "splatseg/error.hpp"

namespace splatseg {

const char* to_string(ShapeKind kind) noexcept {
  switch (kind) {
    case ShapeKind::ellipse:
      return "ellipse";
    case ShapeKind::crescent:
      return "crescent";
    case ShapeKind::blob:
      return "blob";
  }
  return "unknown";
}

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "ellipse") return ShapeKind::ellipse;
  if (name == "crescent") return ShapeKind::crescent;
  if (name == "blob") return ShapeKind::blob;
  throw UsageError("unknown shape kind '" + name + "'");
}

namespace {

std::vector<Harmonic> blob_harmonics(const ShapeSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> weight(0.5, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Harmonic> out;
  for (int h = 0; h < spec.harmonics; ++h) {
    const int order = h + 2;
    const double a = spec.noise_amplitude * weight(rng) / (h + 1);
    out.push_back({order, a, phase(rng)});
  }
  return out;
}

}  // namespace

GeneratedShape generate(const ShapeSpec& spec, Dims dims) {
  if (!(spec.threshold > 0.0 && spec.threshold < 1.0)) {
    throw UsageError("shape threshold must lie in (0, 1)");
  }
  if (spec.harmonics < 0 || spec.harmonics > 4) {
    throw UsageError("blob harmonics must lie in [0, 4]");
  }
  if (!(spec.noise_amplitude >= 0.0)) throw UsageError("blob noise amplitude must be >= 0");

  GeneratedShape out;
  out.spec = spec;
  const ScalarField base = render(spec.primary, dims);
  std::vector<std::uint8_t> pixels(dims.size(), 0);

  switch (spec.kind) {
    case ShapeKind::ellipse:
      for (std::size_t k = 0; k < pixels.size(); ++k) pixels[k] = base[k] > spec.threshold;
      break;
    case ShapeKind::crescent: {
      const ScalarField cut = render(spec.secondary, dims);
      for (std::size_t k = 0; k < pixels.size(); ++k) {
        pixels[k] = base[k] > spec.threshold && !(cut[k] > spec.threshold);
      }
      break;
    }
    case ShapeKind::blob: {
      out.harmonics = blob_harmonics(spec);
      const GaussianSplat& s = spec.primary;
      const double c = std::cos(s.r);
      const double sn = std::sin(s.r);
      for (int j = 0; j < dims.height; ++j) {
        for (int i = 0; i < dims.width; ++i) {
          const double dx = pixel_center(i) - s.mu_x;
          const double dy = pixel_center(j) - s.mu_y;
          const double u = (c * dx + sn * dy) / s.s_x;
          const double v = (-sn * dx + c * dy) / s.s_y;
          const double theta = std::atan2(v, u);
          double radius = 1.0;
          for (const Harmonic& h : out.harmonics) {
            radius += h.amplitude * std::cos(h.order * theta + h.phase);
          }
          radius = std::max(radius, 0.1);
          // G > t^(radius^2) scales the t-contour radially by `radius`.
          const std::size_t k = dims.index(i, j);
          pixels[k] = base[k] > std::pow(spec.threshold, radius * radius);
        }
      }
      break;
    }
  }

  out.mask = BinaryMask(dims, std::move(pixels));
  if (!out.mask.has_both_classes()) {
    throw DegenerateShapeError(std::string(to_string(spec.kind)) +
                               " shape has an empty foreground or background");
  }
  return out;
}

ShapeSpec sample_shape(ShapeKind kind, Dims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double extent = std::min(dims.width, dims.height);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  ShapeSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  GaussianSplat& p = spec.primary;
  p.mu_x = dims.width * between(0.45, 0.55);
  p.mu_y = dims.height * between(0.45, 0.55);
  p.s_x = extent * between(0.12, 0.18);
  p.s_y = p.s_x * between(0.55, 1.0);
  p.r = between(0.0, std::numbers::pi);

  if (kind == ShapeKind::crescent) {
    // A bite taken out of one side: the secondary is a slightly smaller copy
    // pushed off-center along a random direction.
    const double angle = between(0.0, 2.0 * std::numbers::pi);
    const double shift = p.s_x * between(0.7, 0.9);
    spec.secondary = p;
    spec.secondary.mu_x += shift * std::cos(angle);
    spec.secondary.mu_y += shift * std::sin(angle);
    const double shrink = between(0.8, 0.95);
    spec.secondary.s_x *= shrink;
    spec.secondary.s_y *= shrink;
  } else if (kind == ShapeKind::blob) {
    spec.noise_amplitude = between(0.15, 0.25);
    spec.harmonics = 3;
  }
  return spec;
}

ShapeSpec ellipse_with_area(double area, Dims dims, std::uint64_t seed) {
  if (!(area > 0.0)) throw UsageError("ellipse area must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double aspect = 0.55 + 0.45 * unit(rng);
  const double r = std::numbers::pi * unit(rng);
  // area = pi * s_x * s_y * 2 ln 2 with s_y = aspect * s_x
  const double sx = std::sqrt(area / (std::numbers::pi * 2.0 * std::numbers::ln2 * aspect));
  ShapeSpec spec;
  spec.kind = ShapeKind::ellipse;
  spec.seed = seed;
  spec.primary = {dims.width / 2.0, dims.height / 2.0, sx, sx * aspect, r, 1.0};
  return spec;
}

}  // namespace splatseg
