#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace ckm {

// Novel ids C+2.. fold into the unified novel label C+1; other labels pass through.
int collapse_label(int truth, std::size_t num_base_classes);

// Rows are collapsed truths 0..C+1 (0 = background, C+1 = novel); columns are
// predicted labels 1..C+1 stored at column label-1.
struct ConfusionTable {
  std::size_t num_base_classes = 0;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t at(int truth, int predicted) const {
    return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted - 1)];
  }
  bool operator==(const ConfusionTable&) const = default;
};

ConfusionTable confusion(std::span<const int> preds, std::span<const int> truths,
                         std::size_t num_base_classes);

/// P_closed / P_open - 1, with both terms the micro-precision of base-class
/// predictions: P_closed over base-truth samples only, P_open over all samples.
/// Throws UndefinedMetric when either subset has no base-class prediction.
double wilderness_impact(std::span<const int> preds, std::span<const int> truths,
                         std::size_t num_base_classes);
double wilderness_impact(const ConfusionTable& table);

// Novel-truth samples predicted as some base class.
std::size_t aose(std::span<const int> preds, std::span<const int> truths,
                 std::size_t num_base_classes);
std::size_t aose(const ConfusionTable& table);

// Share of novel-truth samples predicted as the unified novel label.
std::optional<double> novel_recall(std::span<const int> preds, std::span<const int> truths,
                                   std::size_t num_base_classes);
std::optional<double> novel_recall(const ConfusionTable& table);

// Share of base-truth samples predicted as their own class.
std::optional<double> base_accuracy(std::span<const int> preds, std::span<const int> truths,
                                    std::size_t num_base_classes);
std::optional<double> base_accuracy(const ConfusionTable& table);

struct SelectionQuality {
  std::optional<double> precision;  // absent when nothing was selected
  std::optional<double> recall;     // absent when the pool holds no novel object
  std::size_t true_positives = 0;
  std::size_t selected = 0;
  std::size_t novel_in_pool = 0;
};

/// Scores BNSM picks against the hidden labels of the unmatched pool: a pick
/// is a hit when its label is a novel id (>= C+2).
SelectionQuality selection_metrics(std::span<const std::size_t> selected_indices,
                                   std::span<const int> pool_truths, std::size_t num_base_classes);

struct MetricReport {
  std::map<int, double> per_class_precision;  // undefined classes omitted
  std::map<int, double> per_class_recall;
  std::optional<double> base_accuracy;
  std::optional<double> novel_recall;
  std::optional<double> wilderness_impact;
  std::size_t aose = 0;
  std::optional<double> selection_precision;
  std::optional<double> selection_recall;
};

// Classification metrics from one prediction set; selection fields are left
// for the caller.
MetricReport evaluate_predictions(std::span<const int> preds, std::span<const int> truths,
                                  std::size_t num_base_classes);

}  // namespace ckm
