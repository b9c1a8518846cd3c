#include "splatseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splatseg/error.hpp"

namespace splatseg {

namespace {

void check_dims(Dims dims, std::size_t n) {
  if (dims.width < 1 || dims.height < 1) {
    throw UsageError("grid dimensions must be >= 1, got " +
                     std::to_string(dims.width) + "x" + std::to_string(dims.height));
  }
  if (n != dims.size()) {
    throw UsageError("grid holds " + std::to_string(n) + " values, expected " +
                     std::to_string(dims.size()));
  }
}

}  // namespace

ScalarField::ScalarField(Dims dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  check_dims(dims_, values_.size());
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericalError("scalar field holds a non-finite value");
  }
}

ScalarField::ScalarField(Dims dims, double fill)
    : ScalarField(dims, std::vector<double>(dims.width > 0 && dims.height > 0 ? dims.size() : 0,
                                            fill)) {}

BinaryMask::BinaryMask(Dims dims, std::vector<std::uint8_t> values)
    : dims_(dims), values_(std::move(values)) {
  check_dims(dims_, values_.size());
  if (std::any_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw UsageError("binary mask values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

bool BinaryMask::has_both_classes() const noexcept {
  const auto n = count();
  return n > 0 && n < values_.size();
}

BinaryMask threshold(const ScalarField& field, double t) {
  std::vector<std::uint8_t> out(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) out[k] = field[k] > t ? 1 : 0;
  return BinaryMask(field.dims(), std::move(out));
}

BinaryMask complement(const BinaryMask& mask) {
  std::vector<std::uint8_t> out(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) out[k] = mask[k] ? 0 : 1;
  return BinaryMask(mask.dims(), std::move(out));
}

ScalarField to_field(const BinaryMask& mask) {
  std::vector<double> out(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) out[k] = mask[k] ? 1.0 : 0.0;
  return ScalarField(mask.dims(), std::move(out));
}

void require_same_dims(Dims a, Dims b, const char* what) {
  if (a != b) {
    throw ShapeMismatchError(std::string(what) + ": shape mismatch (" +
                             std::to_string(a.width) + "x" + std::to_string(a.height) +
                             " vs " + std::to_string(b.width) + "x" +
                             std::to_string(b.height) + ")");
  }
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace splatseg
