#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatseg/grid.hpp"
#include "splatseg/splat.hpp"

namespace splatseg {

enum class ShapeKind { ellipse, crescent, blob };

const char* to_string(ShapeKind kind) noexcept;
// Throws UsageError for an unknown name.
ShapeKind parse_shape_kind(const std::string& name);

// Generating parameters for one synthetic lesion.
//   ellipse:  threshold(render(primary), threshold)
//   crescent: the primary ellipse minus the secondary ellipse
//   blob:     the primary ellipse with its boundary radius modulated by a
//             seeded harmonic series of relative amplitude noise_amplitude
struct ShapeSpec {
  ShapeKind kind = ShapeKind::ellipse;
  GaussianSplat primary;
  GaussianSplat secondary;
  double threshold = 0.5;
  double noise_amplitude = 0.0;
  int harmonics = 3;  // at most 4, orders 2 .. harmonics + 1
  std::uint64_t seed = 0;
};

struct Harmonic {
  int order = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

struct GeneratedShape {
  BinaryMask mask;
  ShapeSpec spec;
  std::vector<Harmonic> harmonics;  // blob boundary terms; empty otherwise
};

// Deterministic in (spec, dims). Throws DegenerateShapeError when the mask
// would lack either class, UsageError for an invalid spec.
GeneratedShape generate(const ShapeSpec& spec, Dims dims);

// Draws a random spec of the given kind sized for `dims`.
ShapeSpec sample_shape(ShapeKind kind, Dims dims, std::uint64_t seed);

// An ellipse whose thresholded area (pi s_x s_y 2 ln 2 at threshold 0.5)
// equals `area`, centered in the grid with a seeded aspect and rotation.
ShapeSpec ellipse_with_area(double area, Dims dims, std::uint64_t seed);

}  // namespace splatseg
