#include "splatseg/augment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "splatseg/error.hpp"

namespace splatseg {

void AugmentationConfig::validate() const {
  for (double p : {p_flip_h, p_flip_v, p_rotate, p_noise, p_resize_crop}) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("augmentation probabilities must lie in [0, 1]");
  }
  if (!(noise_sigma >= 0.0)) throw UsageError("noise sigma must be >= 0");
  for (int deg : rotations) {
    if (deg % 90 != 0) throw UsageError("rotations must be multiples of 90 degrees");
  }
  if (!(scale_min > 0.0 && scale_min <= scale_max)) {
    throw UsageError("zoom range must satisfy 0 < scale_min <= scale_max");
  }
  if (target_size < 0) throw UsageError("target size must be >= 0");
}

AugmentPlan sample_plan(const AugmentationConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Every draw is taken unconditionally so that changing one probability
  // doesn't reshuffle the others.
  const double u_flip_h = unit(rng);
  const double u_flip_v = unit(rng);
  const double u_rotate = unit(rng);
  const double u_choice = unit(rng);
  const double u_zoom = unit(rng);
  const double u_scale = unit(rng);
  const double u_noise = unit(rng);
  const std::uint64_t noise_seed = rng();

  AugmentPlan plan;
  plan.geometry.flip_h = u_flip_h < cfg.p_flip_h;
  plan.geometry.flip_v = u_flip_v < cfg.p_flip_v;
  if (u_rotate < cfg.p_rotate && !cfg.rotations.empty()) {
    const auto pick = std::min(static_cast<std::size_t>(u_choice * cfg.rotations.size()),
                               cfg.rotations.size() - 1);
    plan.geometry.quarter_turns = ((cfg.rotations[pick] / 90) % 4 + 4) % 4;
  }
  if (u_zoom < cfg.p_resize_crop) {
    plan.geometry.zoom = cfg.scale_min + (cfg.scale_max - cfg.scale_min) * u_scale;
  }
  plan.noise = u_noise < cfg.p_noise && cfg.noise_sigma > 0.0;
  plan.noise_seed = noise_seed;
  return plan;
}

namespace {

// Generic index remaps over a row-major grid.
template <typename T, typename Map>
std::vector<T> remap(std::span<const T> in, Dims in_dims, Dims out_dims, Map source_of) {
  std::vector<T> out(out_dims.size());
  for (int j = 0; j < out_dims.height; ++j) {
    for (int i = 0; i < out_dims.width; ++i) {
      const auto [si, sj] = source_of(i, j);
      out[out_dims.index(i, j)] = in[in_dims.index(si, sj)];
    }
  }
  return out;
}

template <typename Grid>
Grid flip_h_impl(const Grid& g) {
  const Dims d = g.dims();
  return Grid(d, remap(g.values(), d, d, [&](int i, int j) {
                return std::pair{d.width - 1 - i, j};
              }));
}

template <typename Grid>
Grid flip_v_impl(const Grid& g) {
  const Dims d = g.dims();
  return Grid(d, remap(g.values(), d, d, [&](int i, int j) {
                return std::pair{i, d.height - 1 - j};
              }));
}

// One clockwise quarter turn: input (i, j) lands on output (H - 1 - j, i).
template <typename Grid>
Grid rotate_once(const Grid& g) {
  const Dims d = g.dims();
  const Dims out{d.height, d.width};
  return Grid(out, remap(g.values(), d, out, [&](int i, int j) {
                return std::pair{j, d.height - 1 - i};
              }));
}

template <typename Grid>
Grid rotate_impl(const Grid& g, int turns) {
  turns = ((turns % 4) + 4) % 4;
  Grid out = g;
  for (int t = 0; t < turns; ++t) out = rotate_once(out);
  return out;
}

// Bilinear sample at continuous pixel-index coordinates (centers at integers).
double bilinear(const ScalarField& f, double x, double y, bool clamp_edges) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const auto value = [&](int i, int j) {
    if (clamp_edges) {
      i = std::clamp(i, 0, f.width() - 1);
      j = std::clamp(j, 0, f.height() - 1);
    } else if (!f.dims().contains(i, j)) {
      return 0.0;
    }
    return f.at(i, j);
  };
  return (1 - fx) * (1 - fy) * value(x0, y0) + fx * (1 - fy) * value(x0 + 1, y0) +
         (1 - fx) * fy * value(x0, y0 + 1) + fx * fy * value(x0 + 1, y0 + 1);
}

void check_zoom(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw UsageError("zoom factor must be > 0");
}

}  // namespace

ScalarField flip_horizontal(const ScalarField& field) { return flip_h_impl(field); }
ScalarField flip_vertical(const ScalarField& field) { return flip_v_impl(field); }
ScalarField rotate_quarter_turns(const ScalarField& field, int turns) {
  return rotate_impl(field, turns);
}
BinaryMask flip_horizontal(const BinaryMask& mask) { return flip_h_impl(mask); }
BinaryMask flip_vertical(const BinaryMask& mask) { return flip_v_impl(mask); }
BinaryMask rotate_quarter_turns(const BinaryMask& mask, int turns) {
  return rotate_impl(mask, turns);
}

ScalarField zoom(const ScalarField& field, double factor) {
  check_zoom(factor);
  if (factor == 1.0) return field;
  const Dims d = field.dims();
  const double cx = d.width / 2.0;
  const double cy = d.height / 2.0;
  std::vector<double> out(d.size());
  for (int j = 0; j < d.height; ++j) {
    for (int i = 0; i < d.width; ++i) {
      const double sx = (pixel_center(i) - cx) / factor + cx;
      const double sy = (pixel_center(j) - cy) / factor + cy;
      out[d.index(i, j)] = bilinear(field, sx - 0.5, sy - 0.5, false);
    }
  }
  return ScalarField(d, std::move(out));
}

BinaryMask zoom(const BinaryMask& mask, double factor) {
  check_zoom(factor);
  if (factor == 1.0) return mask;
  const Dims d = mask.dims();
  const double cx = d.width / 2.0;
  const double cy = d.height / 2.0;
  std::vector<std::uint8_t> out(d.size(), 0);
  for (int j = 0; j < d.height; ++j) {
    for (int i = 0; i < d.width; ++i) {
      const int si = static_cast<int>(std::floor((pixel_center(i) - cx) / factor + cx));
      const int sj = static_cast<int>(std::floor((pixel_center(j) - cy) / factor + cy));
      if (d.contains(si, sj)) out[d.index(i, j)] = mask.at(si, sj) ? 1 : 0;
    }
  }
  return BinaryMask(d, std::move(out));
}

ScalarField resize(const ScalarField& field, Dims dims) {
  if (dims.width < 1 || dims.height < 1) throw UsageError("resize dimensions must be >= 1");
  if (dims == field.dims()) return field;
  const double sx = static_cast<double>(field.width()) / dims.width;
  const double sy = static_cast<double>(field.height()) / dims.height;
  std::vector<double> out(dims.size());
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      out[dims.index(i, j)] =
          bilinear(field, pixel_center(i) * sx - 0.5, pixel_center(j) * sy - 0.5, true);
    }
  }
  return ScalarField(dims, std::move(out));
}

BinaryMask resize(const BinaryMask& mask, Dims dims) {
  if (dims.width < 1 || dims.height < 1) throw UsageError("resize dimensions must be >= 1");
  if (dims == mask.dims()) return mask;
  const double sx = static_cast<double>(mask.width()) / dims.width;
  const double sy = static_cast<double>(mask.height()) / dims.height;
  std::vector<std::uint8_t> out(dims.size());
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      const int si = std::min(static_cast<int>(pixel_center(i) * sx), mask.width() - 1);
      const int sj = std::min(static_cast<int>(pixel_center(j) * sy), mask.height() - 1);
      out[dims.index(i, j)] = mask.at(si, sj) ? 1 : 0;
    }
  }
  return BinaryMask(dims, std::move(out));
}

ScalarField apply(const ScalarField& field, const GeometricOps& ops) {
  ScalarField out = field;
  if (ops.flip_h) out = flip_horizontal(out);
  if (ops.flip_v) out = flip_vertical(out);
  if (ops.quarter_turns != 0) out = rotate_quarter_turns(out, ops.quarter_turns);
  if (ops.zoom != 1.0) out = zoom(out, ops.zoom);
  return out;
}

BinaryMask apply(const BinaryMask& mask, const GeometricOps& ops) {
  BinaryMask out = mask;
  if (ops.flip_h) out = flip_horizontal(out);
  if (ops.flip_v) out = flip_vertical(out);
  if (ops.quarter_turns != 0) out = rotate_quarter_turns(out, ops.quarter_turns);
  if (ops.zoom != 1.0) out = zoom(out, ops.zoom);
  return out;
}

ScalarField invert(const ScalarField& field, const GeometricOps& ops) {
  ScalarField out = field;
  if (ops.zoom != 1.0) out = zoom(out, 1.0 / ops.zoom);
  if (ops.quarter_turns != 0) out = rotate_quarter_turns(out, -ops.quarter_turns);
  if (ops.flip_v) out = flip_vertical(out);
  if (ops.flip_h) out = flip_horizontal(out);
  return out;
}

ScalarField add_noise(const ScalarField& field, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw UsageError("noise sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> out(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) {
    out[k] = std::clamp(field[k] + (sigma > 0.0 ? noise(rng) : 0.0), 0.0, 1.0);
  }
  return ScalarField(field.dims(), std::move(out));
}

AugmentedPair augment(const ScalarField& field, const BinaryMask& mask,
                      const AugmentationConfig& cfg, std::uint64_t seed) {
  require_same_dims(field.dims(), mask.dims(), "augment");
  const AugmentPlan plan = sample_plan(cfg, seed);
  ScalarField f = field;
  BinaryMask m = mask;
  if (cfg.target_size > 0) {
    const Dims target{cfg.target_size, cfg.target_size};
    f = resize(f, target);
    m = resize(m, target);
  }
  f = apply(f, plan.geometry);
  m = apply(m, plan.geometry);
  if (plan.noise) f = add_noise(f, cfg.noise_sigma, plan.noise_seed);
  return {std::move(f), std::move(m)};
}

ScalarField test_time_average(const MaskPredictor& predict, const ScalarField& field,
                              const AugmentationConfig& cfg, int rounds, std::uint64_t seed) {
  if (rounds < 1) throw UsageError("test-time augmentation needs at least one round");
  std::seed_seq seq{seed};
  std::vector<std::uint64_t> round_seeds(static_cast<std::size_t>(rounds));
  seq.generate(round_seeds.begin(), round_seeds.end());

  std::vector<double> sum(field.size(), 0.0);
  for (int round = 0; round < rounds; ++round) {
    const AugmentPlan plan = sample_plan(cfg, round_seeds[static_cast<std::size_t>(round)]);
    ScalarField input = apply(field, plan.geometry);
    if (plan.noise) input = add_noise(input, cfg.noise_sigma, plan.noise_seed);
    const ScalarField prediction = predict(input);
    require_same_dims(prediction.dims(), input.dims(), "test-time prediction");
    const ScalarField back = invert(prediction, plan.geometry);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += back[k];
  }
  for (double& v : sum) v = std::clamp(v / rounds, 0.0, 1.0);
  return ScalarField(field.dims(), std::move(sum));
}

}  // namespace splatseg
