#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splatseg/grid.hpp"

namespace splatseg {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);
ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt);

// Each throws UndefinedMetricError when its denominator is zero.
double jaccard(const ConfusionCounts& c);      // tp / (tp + fp + fn)
double dice(const ConfusionCounts& c);         // 2tp / (2tp + fp + fn)
double pixel_ac(const ConfusionCounts& c);     // (tp + tn) / total
double pixel_se(const ConfusionCounts& c);     // tp / (tp + fn)
double pixel_sp(const ConfusionCounts& c);     // tn / (tn + fp)

double dice_score(const BinaryMask& pred, const BinaryMask& gt);

// Mann-Whitney U / (#pos * #neg), ties counted 1/2. Throws UndefinedMetricError
// unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Non-interpolated AP: mean over positives of the precision at each
// positive's rank, ranking by descending score with ties kept in input
// order. Throws UndefinedMetricError without a positive.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per rank in the AP ordering.
std::vector<PrPoint> pr_curve(std::span<const double> scores,
                              std::span<const std::uint8_t> labels);

struct EvalReport {
  ConfusionCounts counts;
  double jaccard = 0.0;
  double dice = 0.0;
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::optional<double> auc;
  std::optional<double> average_precision;
};

// Hard metrics come from scores > threshold; AUC/AP use the raw scores and
// are left empty when the labels make them undefined.
EvalReport evaluate(std::span<const double> scores, std::span<const std::uint8_t> labels,
                    double threshold = 0.5);
EvalReport evaluate(const ScalarField& prediction, const BinaryMask& gt, double threshold = 0.5);

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold;  // fold index per sample

  std::vector<std::size_t> fold_sizes() const;
  std::vector<std::size_t> members(int f) const;
};

// Seeded shuffle, then round-robin dealing. With `strata`, each stratum is
// shuffled separately and dealt in sequence so every fold gets a near-equal
// share of every stratum. Requires n >= k >= 2.
FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed,
                           std::span<const std::uint8_t> strata = {});

}  // namespace splatseg
