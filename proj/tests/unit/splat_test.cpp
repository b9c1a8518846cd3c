#include <doctest.h>

#include <numbers>

#include "splatseg/error.hpp"
#include "splatseg/gradcheck.hpp"
#include "splatseg/splat.hpp"
#include "support.hpp"

using namespace splatseg;
using doctest::Approx;

namespace {

double weighted_render_sum(std::span<const double> p, const ScalarField& up) {
  const GaussianSplat s{p[0], p[1], p[2], p[3], p[4]};
  const ScalarField g = render(s, up.dims());
  double acc = 0;
  for (std::size_t k = 0; k < g.size(); ++k) acc += up[k] * g[k];
  return acc;
}

}  // namespace

TEST_SUITE("splat") {

TEST_CASE("covariance examples") {
  for (double r : {0.0, 0.3, -2.0, 7.0}) {
    const Covariance2 c = build_covariance({0, 0, 3, 3, r});
    CHECK(c.xx == Approx(9).epsilon(1e-14));
    CHECK(c.yy == Approx(9).epsilon(1e-14));
    CHECK(std::abs(c.xy) < 1e-14);
  }
  const Covariance2 a = build_covariance({0, 0, 2, 1, 0});
  CHECK(a.xx == 4);
  CHECK(a.yy == 1);
  CHECK(a.xy == 0);
  const Covariance2 b = build_covariance({0, 0, 2, 1, std::numbers::pi / 2});
  CHECK(b.xx == Approx(1).epsilon(1e-14));
  CHECK(b.yy == Approx(4).epsilon(1e-14));
  CHECK(std::abs(b.xy) < 1e-14);
}

TEST_CASE("covariance eigenvalues and determinant") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const GaussianSplat s = testing::random_splat(rng, 40, 40);
    const Covariance2 c = build_covariance(s);
    const double tr = c.xx + c.yy;
    const double disc = std::sqrt((c.xx - c.yy) * (c.xx - c.yy) + 4 * c.xy * c.xy);
    const double l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    const double big = std::max(s.s_x, s.s_y), small = std::min(s.s_x, s.s_y);
    CHECK(std::abs(l1 - big * big) < 1e-12 * big * big + 1e-12);
    CHECK(std::abs(l2 - small * small) < 1e-12 * big * big + 1e-12);
    CHECK(c.det() == Approx(s.s_x * s.s_x * s.s_y * s.s_y).epsilon(1e-12));
  }
}

TEST_CASE("degenerate scales are rejected") {
  CHECK_THROWS_AS(build_covariance({0, 0, 0, 1, 0}), DegenerateScaleError);
  CHECK_THROWS_AS(render({0, 0, 1, 5e-4, 0}, {4, 4}), DegenerateScaleError);
  CHECK_THROWS_AS(render_backward({0, 0, -1, 1, 0}, ScalarField({4, 4}, 0.0)),
                  DegenerateScaleError);
  CHECK_NOTHROW(render({0, 0, kMinScale, kMinScale, 0}, {2, 2}));
  GaussianSplat bad_amp{0, 0, 1, 1, 0, 1.5};
  CHECK_THROWS_AS(validate(bad_amp), UsageError);
}

TEST_CASE("render examples") {
  const ScalarField g = render({16.5, 16.5, 4, 4, 0}, {32, 32});
  CHECK(g.at(16, 16) == 1.0);
  CHECK(g.at(20, 16) == Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(g.at(20, 16) == Approx(0.60653).epsilon(1e-5));
  for (double v : g.values()) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
  // No pixel center coincides with mu: the maximum stays below 1.
  const ScalarField off = render({16.2, 16.5, 4, 4, 0}, {32, 32});
  for (double v : off.values()) CHECK(v < 1.0);
}

TEST_CASE("render agrees with an explicit inverse-covariance oracle") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const int w = 8 + static_cast<int>(rng() % 25), h = 8 + static_cast<int>(rng() % 25);
    const GaussianSplat s = testing::random_splat(rng, w, h);
    const ScalarField g = render(s, {w, h});
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) {
        const double ref = testing::gaussian_at(s, i + 0.5, j + 0.5);
        CHECK(std::abs(g.at(i, j) - ref) <= 1e-12 * std::max(ref, 1e-300) + 1e-300);
      }
  }
}

TEST_CASE("rotation by pi leaves the render unchanged") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    GaussianSplat s = testing::random_splat(rng, 24, 24);
    const ScalarField a = render(s, {24, 24});
    s.r += std::numbers::pi;
    const ScalarField b = render(s, {24, 24});
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
  }
}

TEST_CASE("axis swap plus quarter turn is the same splat") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const GaussianSplat s = testing::random_splat(rng, 24, 24);
    const GaussianSplat swapped{s.mu_x, s.mu_y, s.s_y, s.s_x, s.r + std::numbers::pi / 2};
    const ScalarField a = render(s, {24, 24});
    const ScalarField b = render(swapped, {24, 24});
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
  }
}

TEST_CASE("isotropic render decreases along rays from the center") {
  const GaussianSplat s{10.5, 10.5, 3, 3, 1.1};
  const ScalarField g = render(s, {21, 21});
  for (int step = 0; step < 10; ++step) {
    CHECK(g.at(10 + step, 10) > g.at(11 + step, 10));
    CHECK(g.at(10 + step, 10 + step) > g.at(11 + step, 11 + step));
    CHECK(g.at(10, 10 - step) > g.at(10, 9 - step));
  }
}

TEST_CASE("backward: zero upstream and symmetric cancellation") {
  const GaussianSplat s{8, 8, 3, 2, 0};
  const SplatGradient z = render_backward(s, ScalarField({16, 16}, 0.0));
  for (double v : z.values()) CHECK(v == 0.0);
  const SplatGradient sym = render_backward(s, ScalarField({16, 16}, 1.0));
  CHECK(std::abs(sym.d_mu_x) < 1e-12);
  CHECK(std::abs(sym.d_mu_y) < 1e-12);
  CHECK(std::abs(sym.d_r) < 1e-12);
}

TEST_CASE("backward matches central differences on 100 random configurations") {
  std::mt19937_64 rng(99);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const int w = 10 + static_cast<int>(rng() % 20), h = 10 + static_cast<int>(rng() % 20);
    const GaussianSplat s = testing::random_splat(rng, w, h);
    const ScalarField up = testing::random_field(rng, {w, h}, -1.0, 1.0);
    const auto analytic = render_backward(s, up).values();
    const auto p = s.params();
    const auto res = gradient_check([&](std::span<const double> x) { return weighted_render_sum(x, up); },
                                    analytic, p);
    worst = std::max(worst, res.max_relative_error);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("soft mask backward matches central differences") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const GaussianSplat s = testing::random_splat(rng, 20, 20);
    const ScalarField up = testing::random_field(rng, {20, 20}, -1.0, 1.0);
    const auto analytic = render_mask_backward(s, up, 40.0).values();
    const auto p = s.params();
    const auto f = [&](std::span<const double> x) {
      const ScalarField m = render_mask(GaussianSplat{x[0], x[1], x[2], x[3], x[4]}, {20, 20}, 40.0);
      double acc = 0;
      for (std::size_t k = 0; k < m.size(); ++k) acc += up[k] * m[k];
      return acc;
    };
    CHECK(gradient_check(f, analytic, p).max_relative_error < 1e-4);
  }
}

TEST_CASE("soft mask midpoint coincides with the hard threshold") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const GaussianSplat s = testing::random_splat(rng, 24, 24);
    CHECK(threshold(render_mask(s, {24, 24}, 40.0), 0.5) == threshold(render(s, {24, 24}), 0.5));
  }
}

TEST_CASE("backward is bit-reproducible") {
  std::mt19937_64 rng(12);
  const GaussianSplat s = testing::random_splat(rng, 64, 64);
  const ScalarField up = testing::random_field(rng, {64, 64});
  const auto a = render_backward(s, up).values();
  const auto b = render_backward(s, up).values();
  CHECK(a == b);
}

}  // TEST_SUITE
