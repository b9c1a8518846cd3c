#include <doctest.h>

#include <algorithm>
#include <set>

#include "splatseg/error.hpp"
#include "splatseg/metrics.hpp"
#include "support.hpp"

using namespace splatseg;
using doctest::Approx;

namespace {

// Exhaustive pair count with ties worth one half, kept in doubled integers.
double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  long long twice = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        ++pairs;
        twice += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
      }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion fixtures") {
  const BinaryMask gt = testing::mask_from_rows({"##..", "##..", "#...", "#..."});
  const ConfusionCounts same = confusion(gt, gt);
  CHECK(same == ConfusionCounts{6, 0, 10, 0});
  const ConfusionCounts opp = confusion(complement(gt), gt);
  CHECK(opp.tp == 0);
  CHECK(opp.tn == 0);
  CHECK(opp.total() == 16);
  for (auto f : {jaccard, dice, pixel_ac, pixel_se, pixel_sp}) CHECK(f(same) == 1.0);
}

TEST_CASE("hand-counted 4x4 pair") {
  const BinaryMask gt = testing::mask_from_rows({"##..", "##..", "....", "...."});
  const BinaryMask pred = testing::mask_from_rows({"#...", "#...", "##..", "...."});
  const ConfusionCounts c = confusion(pred, gt);
  REQUIRE(c == ConfusionCounts{2, 2, 10, 2});
  CHECK(jaccard(c) == 2.0 / 6.0);
  CHECK(dice(c) == 0.5);
  CHECK(pixel_se(c) == 0.5);
  CHECK(pixel_sp(c) == 10.0 / 12.0);
  CHECK(pixel_ac(c) == 0.75);
}

TEST_CASE("confusion against a column-major tally") {
  std::mt19937_64 rng(1);
  const BinaryMask p = testing::random_mask(rng, 8, 8, 0.5);
  const BinaryMask g = testing::random_mask(rng, 8, 8, 0.5);
  ConfusionCounts ref;
  for (int i = 7; i >= 0; --i)
    for (int j = 0; j < 8; ++j) {
      const bool a = p.at(i, j), b = g.at(i, j);
      if (a && b) ++ref.tp;
      else if (a) ++ref.fp;
      else if (b) ++ref.fn;
      else ++ref.tn;
    }
  CHECK(confusion(p, g) == ref);
  CHECK_THROWS_AS(confusion(p, testing::random_mask(rng, 4, 16, 0.5)), ShapeMismatchError);
}

TEST_CASE("dice and jaccard identity and ordering") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const ConfusionCounts c{rng() % 50 + 1, rng() % 50, rng() % 50, rng() % 50};
    const double ja = jaccard(c), di = dice(c);
    CHECK(std::abs(di - 2 * ja / (1 + ja)) <= 1e-12);
    CHECK(ja <= di);
    CHECK(di <= 1.0);
    CHECK((di == 1.0) == (c.fp == 0 && c.fn == 0));
  }
}

TEST_CASE("undefined metrics throw") {
  const ConfusionCounts none{0, 0, 5, 0};
  CHECK_THROWS_AS(jaccard(none), UndefinedMetricError);
  CHECK_THROWS_AS(dice(none), UndefinedMetricError);
  CHECK_THROWS_AS(pixel_se(none), UndefinedMetricError);
  CHECK_THROWS_AS(pixel_sp(ConfusionCounts{3, 0, 0, 0}), UndefinedMetricError);
  CHECK_THROWS_AS(pixel_ac(ConfusionCounts{}), UndefinedMetricError);
}

TEST_CASE("AUC examples") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  CHECK(roc_auc(s, std::vector<std::uint8_t>{1, 1, 0, 0}) == 1.0);
  CHECK(roc_auc(s, std::vector<std::uint8_t>{1, 0, 1, 0}) == 0.75);
  CHECK(roc_auc(std::vector<double>(6, 0.4), std::vector<std::uint8_t>{1, 0, 1, 0, 0, 1}) == 0.5);
  CHECK_THROWS_AS(roc_auc(s, std::vector<std::uint8_t>{1, 1, 1, 1}), UndefinedMetricError);
}

TEST_CASE("AUC equals the pairwise oracle with ties") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 10) / 10.0;  // plenty of ties
      y[i] = static_cast<std::uint8_t>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(roc_auc(s, y) == pairwise_auc(s, y));
  }
}

TEST_CASE("AUC symmetry and rank invariance") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> s(40), neg(40), ex(40), aff(40);
    std::vector<std::uint8_t> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
      s[i] = u(rng);
      neg[i] = -s[i];
      ex[i] = std::exp(s[i]);
      aff[i] = 3 * s[i] - 7;
      y[i] = static_cast<std::uint8_t>(i % 3 == 0);
    }
    const double a = roc_auc(s, y);
    CHECK(a + roc_auc(neg, y) == Approx(1.0).epsilon(1e-15));
    CHECK(roc_auc(ex, y) == a);
    CHECK(roc_auc(aff, y) == a);
  }
}

TEST_CASE("average precision") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  CHECK(average_precision(s, std::vector<std::uint8_t>{1, 1, 0, 0}) == 1.0);
  CHECK(average_precision(s, std::vector<std::uint8_t>{1, 0, 1, 0}) ==
        Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));
  for (std::size_t n : {1u, 2u, 7u}) {
    std::vector<double> sc(n);
    std::vector<std::uint8_t> y(n, 0);
    for (std::size_t i = 0; i < n; ++i) sc[i] = static_cast<double>(n - i);
    y[n - 1] = 1;
    CHECK(average_precision(sc, y) == Approx(1.0 / static_cast<double>(n)).epsilon(1e-15));
  }
  // Tied scores keep input order.
  CHECK(average_precision(std::vector<double>{0.5, 0.5}, std::vector<std::uint8_t>{0, 1}) == 0.5);
  CHECK_THROWS_AS(average_precision(s, std::vector<std::uint8_t>(4, 0)), UndefinedMetricError);
}

TEST_CASE("AP is 1 exactly when positives outrank negatives") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(20);
    std::vector<std::uint8_t> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] = static_cast<std::uint8_t>(rng() % 2);
      s[i] = u(rng);
    }
    y[0] = 1;
    double min_pos = 2, max_neg = -1;
    for (std::size_t i = 0; i < 20; ++i) (y[i] ? min_pos = std::min(min_pos, s[i]) : max_neg = std::max(max_neg, s[i]));
    CHECK((average_precision(s, y) == 1.0) == (min_pos > max_neg));
  }
}

TEST_CASE("PR curve") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  const std::vector<std::uint8_t> y{1, 0, 1, 0};
  const auto pr = pr_curve(s, y);
  REQUIRE(pr.size() == 4);
  CHECK(pr[0].threshold == 0.9);
  CHECK(pr[0].precision == 1.0);
  CHECK(pr[0].recall == 0.5);
  CHECK(pr[2].precision == Approx(2.0 / 3.0));
  CHECK(pr[3].recall == 1.0);
}

TEST_CASE("evaluate") {
  const BinaryMask gt = testing::mask_from_rows({"##..", "##..", "....", "...."});
  const EvalReport r = evaluate(to_field(gt), gt);
  CHECK(r.jaccard == 1.0);
  CHECK(r.dice == 1.0);
  CHECK(r.accuracy == 1.0);
  CHECK(r.sensitivity == 1.0);
  CHECK(r.specificity == 1.0);
  CHECK(*r.auc == 1.0);
  CHECK(*r.average_precision == 1.0);
  // One class leaves the specificity at 0/0.
  const std::vector<double> s{0.9, 0.1};
  CHECK_THROWS_AS(evaluate(s, std::vector<std::uint8_t>{1, 1}), UndefinedMetricError);
}

TEST_CASE("kfold partitions") {
  for (std::size_t n : {10u, 11u, 200u}) {
    const FoldAssignment f = kfold_split(n, 5, 42);
    REQUIRE(f.fold.size() == n);
    const auto sizes = f.fold_sizes();
    REQUIRE(sizes.size() == 5);
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);
    std::set<std::size_t> seen;
    for (int k = 0; k < 5; ++k)
      for (std::size_t m : f.members(k)) CHECK(seen.insert(m).second);
    CHECK(seen.size() == n);
  }
  auto ten = kfold_split(10, 5, 1).fold_sizes();
  CHECK(ten == std::vector<std::size_t>(5, 2));
  auto eleven = kfold_split(11, 5, 1).fold_sizes();
  std::sort(eleven.begin(), eleven.end());
  CHECK(eleven == std::vector<std::size_t>{2, 2, 2, 2, 3});
  CHECK_THROWS_AS(kfold_split(4, 5, 0), UsageError);
  CHECK_THROWS_AS(kfold_split(10, 1, 0), UsageError);
}

TEST_CASE("kfold is seeded") {
  const auto base = kfold_split(50, 5, 7).fold;
  CHECK(kfold_split(50, 5, 7).fold == base);
  int differ = 0;
  for (std::uint64_t s = 100; s < 120; ++s) differ += kfold_split(50, 5, s).fold != base;
  CHECK(differ == 20);
}

TEST_CASE("stratified kfold spreads every stratum") {
  std::vector<std::uint8_t> strata(103);
  for (std::size_t i = 0; i < strata.size(); ++i) strata[i] = static_cast<std::uint8_t>(i % 7 == 0);
  const FoldAssignment f = kfold_split(strata.size(), 5, 3, strata);
  for (std::uint8_t cls : {0, 1}) {
    std::vector<int> per(5, 0);
    for (std::size_t i = 0; i < strata.size(); ++i)
      if (strata[i] == cls) ++per[f.fold[i]];
    const auto [lo, hi] = std::minmax_element(per.begin(), per.end());
    CHECK(*hi - *lo <= 1);
  }
  const auto sizes = f.fold_sizes();
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);
}

}  // TEST_SUITE
