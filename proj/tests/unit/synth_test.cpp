#include <doctest.h>

#include <numbers>

#include "splatseg/augment.hpp"
#include "splatseg/error.hpp"
#include "splatseg/fit.hpp"
#include "splatseg/splat.hpp"
#include "splatseg/synth.hpp"
#include "support.hpp"

using namespace splatseg;
using doctest::Approx;

namespace {

AugmentationConfig nothing() {
  AugmentationConfig cfg;
  cfg.p_flip_h = cfg.p_flip_v = cfg.p_rotate = cfg.p_noise = cfg.p_resize_crop = 0.0;
  cfg.target_size = 0;
  return cfg;
}

// An asymmetric L-shaped mask.
BinaryMask ell() {
  return testing::mask_from_rows({"#....", "#....", "#....", "###..", ".....", "....."});
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("ellipse spec is the thresholded render") {
  ShapeSpec spec;
  spec.primary = {16.5, 16.5, 6, 3, 0.4};
  const GeneratedShape g = generate(spec, {32, 32});
  CHECK(g.mask == threshold(render(spec.primary, {32, 32}), 0.5));
  CHECK(g.spec.primary == spec.primary);
  CHECK(g.harmonics.empty());
}

TEST_CASE("crescent subtracts the secondary") {
  ShapeSpec spec;
  spec.kind = ShapeKind::crescent;
  spec.primary = {20, 20, 8, 6, 0.2};
  spec.secondary = {24, 20, 7, 5, 0.2};
  const Dims d{40, 40};
  const BinaryMask a = threshold(render(spec.primary, d), 0.5);
  const BinaryMask b = threshold(render(spec.secondary, d), 0.5);
  const BinaryMask c = generate(spec, d).mask;
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == (a[k] && !b[k]));

  spec.secondary = spec.primary;
  CHECK_THROWS_AS(generate(spec, d), DegenerateShapeError);
  spec.secondary.s_x = 12;
  spec.secondary.s_y = 12;
  CHECK_THROWS_AS(generate(spec, d), DegenerateShapeError);
}

TEST_CASE("blob with zero noise is its base ellipse") {
  ShapeSpec spec = sample_shape(ShapeKind::blob, {48, 48}, 4);
  spec.noise_amplitude = 0.0;
  ShapeSpec plain = spec;
  plain.kind = ShapeKind::ellipse;
  CHECK(generate(spec, {48, 48}).mask == generate(plain, {48, 48}).mask);
}

TEST_CASE("blob noise changes the outline and stays seeded") {
  const ShapeSpec spec = sample_shape(ShapeKind::blob, {48, 48}, 4);
  CHECK(spec.noise_amplitude > 0);
  const GeneratedShape a = generate(spec, {48, 48});
  CHECK(a.harmonics.size() == static_cast<std::size_t>(spec.harmonics));
  for (std::size_t h = 0; h < a.harmonics.size(); ++h) CHECK(a.harmonics[h].order == int(h) + 2);
  ShapeSpec plain = spec;
  plain.kind = ShapeKind::ellipse;
  CHECK(a.mask != generate(plain, {48, 48}).mask);
  ShapeSpec other = spec;
  other.seed += 1;
  CHECK(generate(other, {48, 48}).mask != a.mask);
}

TEST_CASE("generation is pure") {
  for (ShapeKind kind : {ShapeKind::ellipse, ShapeKind::crescent, ShapeKind::blob}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ShapeSpec spec = sample_shape(kind, {64, 64}, seed);
      CHECK(sample_shape(kind, {64, 64}, seed).primary == spec.primary);
      const GeneratedShape a = generate(spec, {64, 64});
      CHECK(generate(spec, {64, 64}).mask == a.mask);
      CHECK(a.mask.has_both_classes());
    }
  }
}

TEST_CASE("ellipse with a requested area") {
  for (double area : {200.0, 600.0, 1200.0}) {
    const ShapeSpec spec = ellipse_with_area(area, {64, 64}, 3);
    CHECK(std::numbers::pi * spec.primary.s_x * spec.primary.s_y * 2 * std::log(2.0) ==
          Approx(area).epsilon(1e-12));
    const double got = static_cast<double>(generate(spec, {64, 64}).mask.count());
    CHECK(got == Approx(area).epsilon(0.05));
  }
}

TEST_CASE("shape names") {
  CHECK(parse_shape_kind("blob") == ShapeKind::blob);
  CHECK(std::string(to_string(ShapeKind::crescent)) == "crescent");
  CHECK_THROWS_AS(parse_shape_kind("square"), UsageError);
}

}  // TEST_SUITE

TEST_SUITE("augment") {

TEST_CASE("probability zero is the identity") {
  std::mt19937_64 rng(1);
  const ScalarField f = testing::random_field(rng, {9, 6});
  const BinaryMask m = testing::random_mask(rng, 9, 6, 0.4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AugmentedPair p = augment(f, m, nothing(), seed);
    CHECK(p.field == f);
    CHECK(p.mask == m);
  }
}

TEST_CASE("forced flips are involutions") {
  AugmentationConfig cfg = nothing();
  cfg.p_flip_h = 1.0;
  std::mt19937_64 rng(2);
  const ScalarField f = testing::random_field(rng, {7, 5});
  const BinaryMask m = testing::random_mask(rng, 7, 5, 0.5);
  const AugmentedPair once = augment(f, m, cfg, 1);
  CHECK(once.field.at(0, 2) == f.at(6, 2));
  const AugmentedPair twice = augment(once.field, once.mask, cfg, 2);
  CHECK(twice.field == f);
  CHECK(twice.mask == m);
  CHECK(flip_vertical(flip_vertical(m)) == m);
  CHECK(flip_vertical(f).at(3, 0) == f.at(3, 4));
}

TEST_CASE("quarter turn matches an index-permutation oracle") {
  AugmentationConfig cfg = nothing();
  cfg.p_rotate = 1.0;
  cfg.rotations = {90};
  const BinaryMask m = ell();
  const int w = m.width(), h = m.height();
  std::vector<std::uint8_t> expect(m.size());
  // Clockwise: the left column becomes the top row read right to left.
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) expect[static_cast<std::size_t>(i) * h + (h - 1 - j)] = m.at(i, j);
  const AugmentedPair p = augment(to_field(m), m, cfg, 0);
  CHECK(p.mask == BinaryMask({h, w}, expect));
  CHECK(p.field == to_field(p.mask));
  CHECK(p.mask.at(h - 1, 0));
  CHECK(p.mask.at(h - 4, 2));
}

TEST_CASE("rotation round trips exactly") {
  std::mt19937_64 rng(3);
  const BinaryMask m = testing::random_mask(rng, 11, 4, 0.5);
  const ScalarField f = testing::random_field(rng, {11, 4});
  for (int t = -4; t <= 4; ++t) {
    CHECK(rotate_quarter_turns(rotate_quarter_turns(m, t), -t) == m);
    CHECK(rotate_quarter_turns(rotate_quarter_turns(f, t), 4 - t) == f);
  }
  CHECK(rotate_quarter_turns(rotate_quarter_turns(m, 1), 1) == flip_vertical(flip_horizontal(m)));
}

TEST_CASE("geometry hits field and mask identically; noise only the field") {
  AugmentationConfig cfg;
  cfg.target_size = 0;
  cfg.p_flip_h = cfg.p_flip_v = cfg.p_rotate = cfg.p_noise = 1.0;
  cfg.p_resize_crop = 0.0;
  const BinaryMask m = ell();
  const AugmentedPair p = augment(to_field(m), m, cfg, 9);
  const AugmentPlan plan = sample_plan(cfg, 9);
  CHECK(plan.noise);
  CHECK(p.mask == apply(m, plan.geometry));
  CHECK(p.field != apply(to_field(m), plan.geometry));
  CHECK(p.field == add_noise(apply(to_field(m), plan.geometry), cfg.noise_sigma, plan.noise_seed));
  for (double v : p.field.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("augment is seeded and keeps both classes") {
  AugmentationConfig cfg;
  cfg.target_size = 32;
  const BinaryMask m = threshold(render({10, 12, 5, 3, 0.5}, {24, 24}), 0.5);
  const ScalarField f = render({10, 12, 5, 3, 0.5}, {24, 24});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AugmentedPair a = augment(f, m, cfg, seed);
    const AugmentedPair b = augment(f, m, cfg, seed);
    CHECK(a.field == b.field);
    CHECK(a.mask == b.mask);
    CHECK(a.mask.dims() == Dims{32, 32});
    CHECK(a.mask.has_both_classes());
  }
}

TEST_CASE("zoom keeps the grid and scales about the center") {
  const BinaryMask m = threshold(render({16, 16, 4, 4, 0}, {32, 32}), 0.5);
  const BinaryMask big = zoom(m, 1.5);
  CHECK(big.dims() == m.dims());
  CHECK(static_cast<double>(big.count()) == Approx(2.25 * m.count()).epsilon(0.1));
  CHECK(zoom(m, 1.0) == m);
  CHECK_THROWS_AS(zoom(m, 0.0), UsageError);
}

TEST_CASE("test-time averaging") {
  std::mt19937_64 rng(4);
  const ScalarField f = testing::random_field(rng, {20, 16});
  AugmentationConfig cfg;
  const auto constant = [](const ScalarField& in) { return ScalarField(in.dims(), 0.37); };
  const ScalarField c = test_time_average(constant, f, nothing(), 3, 1);
  for (double v : c.values()) CHECK(v == Approx(0.37).epsilon(1e-15));

  const auto square = [](const ScalarField& in) {
    std::vector<double> v(in.values().begin(), in.values().end());
    for (auto& x : v) x *= x;
    return ScalarField(in.dims(), v);
  };
  const ScalarField one = test_time_average(square, f, nothing(), 1, 5);
  CHECK(one == square(f));

  // Moment-matched splat rendering commutes with flips.
  AugmentationConfig flips = nothing();
  flips.p_flip_h = flips.p_flip_v = 0.5;
  const ScalarField img = render({8.3, 9.1, 4, 2.5, 0.6}, {20, 16});
  const auto predictor = [](const ScalarField& in) {
    return render(moment_match(threshold(in, 0.5)), in.dims());
  };
  const ScalarField single = predictor(img);
  const ScalarField avg = test_time_average(predictor, img, flips, 3, 11);
  for (std::size_t k = 0; k < avg.size(); ++k) CHECK(std::abs(avg[k] - single[k]) < 1e-6);
  CHECK_THROWS_AS(test_time_average(constant, f, cfg, 0, 1), UsageError);
}

TEST_CASE("config validation") {
  AugmentationConfig cfg;
  CHECK(cfg.target_size == 224);
  CHECK(cfg.p_flip_h == 0.5);
  cfg.p_noise = 1.5;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.rotations = {45};
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

}  // TEST_SUITE
