#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "splatseg/grid.hpp"
#include "splatseg/splat.hpp"

namespace testing {

inline splatseg::BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double p) {
  std::bernoulli_distribution on(p);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = on(rng) ? 1 : 0;
  return {{w, h}, std::move(v)};
}

// Random masks forced to contain both classes.
inline splatseg::BinaryMask random_two_class_mask(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> density(0.05, 0.95);
  for (;;) {
    auto m = random_mask(rng, w, h, density(rng));
    if (m.has_both_classes()) return m;
  }
}

inline splatseg::BinaryMask mask_from_rows(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> v;
  for (const auto& row : rows)
    for (char c : row) v.push_back(c == '#' ? 1 : 0);
  return {{w, h}, std::move(v)};
}

inline splatseg::ScalarField random_field(std::mt19937_64& rng, splatseg::Dims d, double lo = 0.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(d.size());
  for (auto& x : v) x = u(rng);
  return {d, std::move(v)};
}

// Splat comfortably inside a w x h grid with scales well above the clamp.
inline splatseg::GaussianSplat random_splat(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  splatseg::GaussianSplat s;
  s.mu_x = w * (0.3 + 0.4 * u(rng));
  s.mu_y = h * (0.3 + 0.4 * u(rng));
  s.s_x = 1.5 + 0.2 * w * u(rng);
  s.s_y = 1.5 + 0.2 * h * u(rng);
  s.r = -3.0 + 6.0 * u(rng);
  return s;
}

// G at one point from an explicitly inverted covariance.
inline double gaussian_at(const splatseg::GaussianSplat& s, double x, double y) {
  const double c = std::cos(s.r), sn = std::sin(s.r);
  const double a = c * c * s.s_x * s.s_x + sn * sn * s.s_y * s.s_y;
  const double b = c * sn * (s.s_x * s.s_x - s.s_y * s.s_y);
  const double d = sn * sn * s.s_x * s.s_x + c * c * s.s_y * s.s_y;
  const double det = a * d - b * b;
  const double ia = d / det, ib = -b / det, id = a / det;
  const double dx = x - s.mu_x, dy = y - s.mu_y;
  return std::exp(-0.5 * (ia * dx * dx + 2.0 * ib * dx * dy + id * dy * dy));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("splatseg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
