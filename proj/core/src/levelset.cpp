#include "splatseg/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splatseg/error.hpp"
#include "splatseg/numeric.hpp"

namespace splatseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_boundary(const BinaryMask& mask) {
  if (!mask.has_both_classes()) {
    throw UndefinedBoundaryError(
        "level set needs a mask with both foreground and background pixels");
  }
}

// Exact 1D squared-distance transform over the finite entries of f
// (lower envelope of parabolas rooted at the finite sites).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& sites,
            std::vector<double>& bounds) {
  const int n = static_cast<int>(f.size());
  sites.clear();
  bounds.clear();
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + static_cast<double>(q) * q;
    while (!sites.empty()) {
      const int v = sites.back();
      const double s = (fq - (f[v] + static_cast<double>(v) * v)) / (2.0 * (q - v));
      if (s <= bounds.back()) {
        sites.pop_back();
        bounds.pop_back();
      } else {
        sites.push_back(q);
        bounds.push_back(s);
        break;
      }
    }
    if (sites.empty()) {
      sites.push_back(q);
      bounds.push_back(-kInf);
    }
  }
  if (sites.empty()) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  std::size_t k = 0;
  for (int q = 0; q < n; ++q) {
    while (k + 1 < sites.size() && bounds[k + 1] < q) ++k;
    const double delta = q - sites[k];
    d[q] = delta * delta + f[sites[k]];
  }
}

std::vector<double> apply_sign(const BinaryMask& mask, std::vector<double> squared) {
  for (std::size_t k = 0; k < squared.size(); ++k) {
    if (mask[k] && squared[k] != 0.0) squared[k] = -squared[k];
  }
  return squared;
}

LevelSetField from_signed_squared(Dims dims, const std::vector<double>& squared) {
  std::vector<double> out(squared.size());
  for (std::size_t k = 0; k < squared.size(); ++k) {
    out[k] = std::copysign(std::sqrt(std::abs(squared[k])), squared[k]);
    if (squared[k] == 0.0) out[k] = 0.0;
  }
  return ScalarField(dims, std::move(out));
}

}  // namespace

BinaryMask boundary_pixels(const BinaryMask& mask) {
  const Dims dims = mask.dims();
  std::vector<std::uint8_t> out(mask.size(), 0);
  const auto background = [&](int i, int j) { return !dims.contains(i, j) || !mask.at(i, j); };
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      if (!mask.at(i, j)) continue;
      if (background(i - 1, j) || background(i + 1, j) || background(i, j - 1) ||
          background(i, j + 1)) {
        out[dims.index(i, j)] = 1;
      }
    }
  }
  return BinaryMask(dims, std::move(out));
}

std::vector<double> signed_squared_edt(const BinaryMask& mask) {
  require_boundary(mask);
  const Dims dims = mask.dims();
  const BinaryMask boundary = boundary_pixels(mask);

  std::vector<double> grid(dims.size());
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = boundary[k] ? 0.0 : kInf;

  std::vector<int> sites;
  std::vector<double> bounds;

  // Columns.
  std::vector<double> f(dims.height), d(dims.height);
  for (int i = 0; i < dims.width; ++i) {
    for (int j = 0; j < dims.height; ++j) f[j] = grid[dims.index(i, j)];
    edt_1d(f, d, sites, bounds);
    for (int j = 0; j < dims.height; ++j) grid[dims.index(i, j)] = d[j];
  }
  // Rows.
  f.resize(dims.width);
  d.resize(dims.width);
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) f[i] = grid[dims.index(i, j)];
    edt_1d(f, d, sites, bounds);
    for (int i = 0; i < dims.width; ++i) grid[dims.index(i, j)] = d[i];
  }
  return apply_sign(mask, std::move(grid));
}

std::vector<double> brute_force_signed_squared_edt(const BinaryMask& mask) {
  require_boundary(mask);
  const Dims dims = mask.dims();
  const BinaryMask boundary = boundary_pixels(mask);
  std::vector<std::pair<int, int>> sites;
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      if (boundary.at(i, j)) sites.emplace_back(i, j);
    }
  }
  std::vector<double> out(dims.size());
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      long best = std::numeric_limits<long>::max();
      for (const auto& [bi, bj] : sites) {
        const long di = i - bi;
        const long dj = j - bj;
        best = std::min(best, di * di + dj * dj);
      }
      out[dims.index(i, j)] = static_cast<double>(best);
    }
  }
  return apply_sign(mask, std::move(out));
}

LevelSetField signed_edt(const BinaryMask& mask) {
  return from_signed_squared(mask.dims(), signed_squared_edt(mask));
}

LevelSetField brute_force_edt(const BinaryMask& mask) {
  return from_signed_squared(mask.dims(), brute_force_signed_squared_edt(mask));
}

ScalarField lsf_to_soft_mask(const LevelSetField& lsf, double k, double sign) {
  if (!(k > 0.0) || !std::isfinite(k)) throw UsageError("sigmoid steepness k must be > 0");
  if (sign != 1.0 && sign != -1.0) throw UsageError("level-set sign must be +1 or -1");
  std::vector<double> out(lsf.size());
  for (std::size_t i = 0; i < lsf.size(); ++i) out[i] = sigmoid(sign * k * lsf[i]);
  return ScalarField(lsf.dims(), std::move(out));
}

LevelSetField clip_lsf(const LevelSetField& lsf, double radius) {
  if (!(radius > 0.0)) return lsf;
  std::vector<double> out(lsf.values().begin(), lsf.values().end());
  for (double& v : out) v = std::clamp(v, -radius, radius);
  return ScalarField(lsf.dims(), std::move(out));
}

UnitMapping unit_mapping_for(const LevelSetField& lsf) {
  const auto [lo, hi] = std::minmax_element(lsf.values().begin(), lsf.values().end());
  const double span = *hi - *lo;
  return {*lo, span > 0.0 ? span : 1.0};
}

ScalarField to_unit(const LevelSetField& lsf, const UnitMapping& mapping) {
  std::vector<double> out(lsf.size());
  for (std::size_t k = 0; k < lsf.size(); ++k) {
    out[k] = std::clamp((lsf[k] - mapping.offset) / mapping.scale, 0.0, 1.0);
  }
  return ScalarField(lsf.dims(), std::move(out));
}

LevelSetField from_unit(const ScalarField& unit, const UnitMapping& mapping) {
  std::vector<double> out(unit.size());
  for (std::size_t k = 0; k < unit.size(); ++k) out[k] = unit[k] * mapping.scale + mapping.offset;
  return ScalarField(unit.dims(), std::move(out));
}

}  // namespace splatseg
