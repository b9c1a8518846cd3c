#include "splatseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "splatseg/error.hpp"

namespace splatseg {

ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt) {
  if (pred.size() != gt.size()) throw ShapeMismatchError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const bool p = pred[k] != 0;
    const bool g = gt[k] != 0;
    if (p && g) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_dims(pred.dims(), gt.dims(), "confusion");
  return confusion(pred.values(), gt.values());
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, const char* metric) {
  if (den == 0) throw UndefinedMetricError(std::string(metric) + " is undefined (0/0)");
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double jaccard(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp + c.fn, "jaccard"); }
double dice(const ConfusionCounts& c) { return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, "dice"); }
double pixel_ac(const ConfusionCounts& c) { return ratio(c.tp + c.tn, c.total(), "accuracy"); }
double pixel_se(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn, "sensitivity"); }
double pixel_sp(const ConfusionCounts& c) { return ratio(c.tn, c.tn + c.fp, "specificity"); }

double dice_score(const BinaryMask& pred, const BinaryMask& gt) {
  return dice(confusion(pred, gt));
}

namespace {

void check_scores(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeMismatchError("scores and labels differ in length");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw NumericalError("score is NaN");
  }
}

std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_scores(scores, labels);
  const auto positives = static_cast<std::uint64_t>(
      std::count_if(labels.begin(), labels.end(), [](std::uint8_t l) { return l != 0; }));
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUC needs both positive and negative samples");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based mid-ranks of the positives, doubled to stay integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const std::uint64_t twice_mid_rank = (i + 1) + (j + 1);
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]]) twice_rank_sum += twice_mid_rank;
    }
    i = j + 1;
  }
  // 2U = 2 R_pos - P (P + 1)
  const std::uint64_t twice_u = twice_rank_sum - positives * (positives + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(positives) *
                                         static_cast<double>(negatives));
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_scores(scores, labels);
  const auto order = descending_order(scores);
  double sum = 0.0;
  std::uint64_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) throw UndefinedMetricError("average precision needs at least one positive");
  return sum / static_cast<double>(hits);
}

std::vector<PrPoint> pr_curve(std::span<const double> scores,
                              std::span<const std::uint8_t> labels) {
  check_scores(scores, labels);
  const auto positives = static_cast<std::uint64_t>(
      std::count_if(labels.begin(), labels.end(), [](std::uint8_t l) { return l != 0; }));
  if (positives == 0) throw UndefinedMetricError("PR curve needs at least one positive");
  const auto order = descending_order(scores);
  std::vector<PrPoint> curve;
  curve.reserve(order.size());
  std::uint64_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]]) ++hits;
    curve.push_back({scores[order[rank]],
                     static_cast<double>(hits) / static_cast<double>(rank + 1),
                     static_cast<double>(hits) / static_cast<double>(positives)});
  }
  return curve;
}

EvalReport evaluate(std::span<const double> scores, std::span<const std::uint8_t> labels,
                    double threshold) {
  check_scores(scores, labels);
  std::vector<std::uint8_t> hard(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) hard[k] = scores[k] > threshold ? 1 : 0;

  EvalReport report;
  report.counts = confusion(hard, labels);
  report.jaccard = jaccard(report.counts);
  report.dice = dice(report.counts);
  report.accuracy = pixel_ac(report.counts);
  report.sensitivity = pixel_se(report.counts);
  report.specificity = pixel_sp(report.counts);
  const std::uint64_t positives = report.counts.tp + report.counts.fn;
  if (positives > 0 && positives < report.counts.total()) {
    report.auc = roc_auc(scores, labels);
  }
  if (positives > 0) report.average_precision = average_precision(scores, labels);
  return report;
}

EvalReport evaluate(const ScalarField& prediction, const BinaryMask& gt, double threshold) {
  require_same_dims(prediction.dims(), gt.dims(), "evaluate");
  return evaluate(prediction.values(), gt.values(), threshold);
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::vector<std::size_t> FoldAssignment::members(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == f) out.push_back(i);
  }
  return out;
}

FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed,
                           std::span<const std::uint8_t> strata) {
  if (k < 2) throw UsageError("kfold: k must be >= 2");
  if (n < static_cast<std::size_t>(k)) throw UsageError("kfold: need n >= k");
  if (!strata.empty() && strata.size() != n) {
    throw ShapeMismatchError("kfold: strata length must equal n");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order;
  order.reserve(n);
  if (strata.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
  } else {
    std::vector<std::uint8_t> keys(strata.begin(), strata.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (std::uint8_t key : keys) {
      std::vector<std::size_t> group;
      for (std::size_t i = 0; i < n; ++i) {
        if (strata[i] == key) group.push_back(i);
      }
      std::shuffle(group.begin(), group.end(), rng);
      order.insert(order.end(), group.begin(), group.end());
    }
  }

  FoldAssignment out;
  out.k = k;
  out.fold.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    out.fold[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return out;
}

}  // namespace splatseg
