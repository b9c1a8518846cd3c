#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "splatseg/grid.hpp"

namespace splatseg {

struct AugmentationConfig {
  double p_flip_h = 0.5;
  double p_flip_v = 0.5;
  double p_rotate = 0.5;
  double p_noise = 0.5;
  double p_resize_crop = 0.5;
  double noise_sigma = 0.05;
  // Rotation choices in degrees; multiples of 90 only.
  std::vector<int> rotations{90, 180, 270};
  // Zoom range for resize + center-crop.
  double scale_min = 0.8;
  double scale_max = 1.2;
  // Inputs are first resized to target_size x target_size; 0 keeps the
  // input dimensions.
  int target_size = 224;

  void validate() const;
};

// The geometric part of one augmentation draw, applied in the order
// flip_h, flip_v, rotate, zoom.
struct GeometricOps {
  bool flip_h = false;
  bool flip_v = false;
  int quarter_turns = 0;  // clockwise, 0..3
  double zoom = 1.0;      // 1 = no resize/crop
};

struct AugmentPlan {
  GeometricOps geometry;
  bool noise = false;
  std::uint64_t noise_seed = 0;
};

AugmentPlan sample_plan(const AugmentationConfig& cfg, std::uint64_t seed);

ScalarField flip_horizontal(const ScalarField& field);
ScalarField flip_vertical(const ScalarField& field);
ScalarField rotate_quarter_turns(const ScalarField& field, int turns);
BinaryMask flip_horizontal(const BinaryMask& mask);
BinaryMask flip_vertical(const BinaryMask& mask);
BinaryMask rotate_quarter_turns(const BinaryMask& mask, int turns);

// Scales about the grid center and crops/pads back to the same dimensions.
// Fields are sampled bilinearly (zero outside), masks by nearest neighbor.
ScalarField zoom(const ScalarField& field, double factor);
BinaryMask zoom(const BinaryMask& mask, double factor);

ScalarField resize(const ScalarField& field, Dims dims);
BinaryMask resize(const BinaryMask& mask, Dims dims);

ScalarField apply(const ScalarField& field, const GeometricOps& ops);
BinaryMask apply(const BinaryMask& mask, const GeometricOps& ops);
// Undoes `ops`. Exact for flips and rotations; zoom is inverted by resampling.
ScalarField invert(const ScalarField& field, const GeometricOps& ops);

// Additive Gaussian noise clamped to [0, 1].
ScalarField add_noise(const ScalarField& field, double sigma, std::uint64_t seed);

struct AugmentedPair {
  ScalarField field;
  BinaryMask mask;
};

// Geometric transforms hit field and mask identically; noise only the field.
AugmentedPair augment(const ScalarField& field, const BinaryMask& mask,
                      const AugmentationConfig& cfg, std::uint64_t seed);

using MaskPredictor = std::function<ScalarField(const ScalarField&)>;

// Runs `predict` on `rounds` augmented copies of `field`, maps each
// prediction back to the input frame, and averages. target_size is ignored
// here; predictions are always returned at the input resolution.
ScalarField test_time_average(const MaskPredictor& predict, const ScalarField& field,
                              const AugmentationConfig& cfg, int rounds, std::uint64_t seed);

}  // namespace splatseg
