#pragma once

#include <vector>

#include "splatseg/grid.hpp"

namespace splatseg {

// Signed distances in pixels: negative inside the foreground, zero on the
// boundary, positive outside.
using LevelSetField = ScalarField;

// Boundary pixels are foreground pixels with at least one background
// 4-neighbor. Pixels beyond the grid edge count as background.
BinaryMask boundary_pixels(const BinaryMask& mask);

// Signed squared distance from every pixel center to the nearest boundary
// pixel center. Values are exact integers (stored as double), negated inside.
// Two-pass separable lower-envelope transform, O(width * height).
//
// Throws UndefinedBoundaryError unless the mask has both classes.
std::vector<double> signed_squared_edt(const BinaryMask& mask);

// Same contract, by exhaustive minimization over all boundary pixels.
std::vector<double> brute_force_signed_squared_edt(const BinaryMask& mask);

LevelSetField signed_edt(const BinaryMask& mask);
LevelSetField brute_force_edt(const BinaryMask& mask);

// M' = sigmoid(sign * k * L). The default sign of -1 maps the interior
// (L < 0) above 0.5; +1 reproduces the literal sigmoid(k * L).
inline constexpr double kDefaultSteepness = 1500.0;
ScalarField lsf_to_soft_mask(const LevelSetField& lsf, double k = kDefaultSteepness,
                             double sign = -1.0);

// Clamps distances to [-radius, radius]. A radius <= 0 returns the input.
LevelSetField clip_lsf(const LevelSetField& lsf, double radius);

// Affine map between a level set and [0, 1] for raster export:
// unit = (L - offset) / scale, L = unit * scale + offset.
struct UnitMapping {
  double offset = 0.0;
  double scale = 1.0;
};

UnitMapping unit_mapping_for(const LevelSetField& lsf);
ScalarField to_unit(const LevelSetField& lsf, const UnitMapping& mapping);
LevelSetField from_unit(const ScalarField& unit, const UnitMapping& mapping);

}  // namespace splatseg
