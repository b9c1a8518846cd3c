#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace splatseg {

// Grid dimensions. Pixel (i, j) is column i, row j; storage is row-major
// with the origin at the top-left, and the pixel's center sits at the
// continuous coordinate (i + 0.5, j + 0.5).
struct Dims {
  int width = 0;
  int height = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(i);
  }
  bool contains(int i, int j) const noexcept {
    return i >= 0 && j >= 0 && i < width && j < height;
  }

  friend bool operator==(const Dims&, const Dims&) = default;
};

inline double pixel_center(int index) noexcept { return index + 0.5; }

// Immutable W x H grid of finite reals.
class ScalarField {
 public:
  ScalarField() = default;
  // Throws UsageError on bad dimensions or size mismatch and NumericalError
  // on a non-finite value.
  ScalarField(Dims dims, std::vector<double> values);
  ScalarField(Dims dims, double fill);

  Dims dims() const noexcept { return dims_; }
  int width() const noexcept { return dims_.width; }
  int height() const noexcept { return dims_.height; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(int i, int j) const noexcept { return values_[dims_.index(i, j)]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Dims dims_;
  std::vector<double> values_;
};

// Immutable W x H grid of {0, 1} pixels.
class BinaryMask {
 public:
  BinaryMask() = default;
  // Throws UsageError on bad dimensions, size mismatch, or a value outside {0,1}.
  BinaryMask(Dims dims, std::vector<std::uint8_t> values);

  Dims dims() const noexcept { return dims_; }
  int width() const noexcept { return dims_.width; }
  int height() const noexcept { return dims_.height; }
  std::size_t size() const noexcept { return values_.size(); }

  bool at(int i, int j) const noexcept { return values_[dims_.index(i, j)] != 0; }
  std::uint8_t operator[](std::size_t k) const noexcept { return values_[k]; }
  std::span<const std::uint8_t> values() const noexcept { return values_; }

  std::size_t count() const noexcept;
  bool has_both_classes() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> values_;
};

// pixel = 1 iff value > t.
BinaryMask threshold(const ScalarField& field, double t = 0.5);

BinaryMask complement(const BinaryMask& mask);

// The mask as a {0.0, 1.0} field.
ScalarField to_field(const BinaryMask& mask);

void require_same_dims(Dims a, Dims b, const char* what);

// Pairwise (tree) summation. The result depends only on the input order,
// never on how the work is scheduled.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace splatseg
