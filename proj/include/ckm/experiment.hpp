#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ckm/config.hpp"
#include "ckm/eval.hpp"
#include "ckm/memory_bank.hpp"
#include "ckm/probe.hpp"
#include "ckm/simulator.hpp"

namespace ckm {

struct MetricRow {
  std::size_t iter = 0;
  MetricReport metrics;  // base_accuracy is the AFA assignment accuracy
  std::optional<double> loss_nc;
  std::optional<double> loss_ac;
};

struct ExperimentReport {
  std::vector<MetricRow> rows;  // one per eval_every iterations
  MetricRow summary;            // end-of-run evaluation, whole-run selection and losses
  std::optional<double> baseline_accuracy;  // nearest source prototype, source-only bank
  std::optional<double> probe_base_accuracy;
  // Novel share of every unmatched pool the selector saw; the chance-level
  // selection precision.
  std::optional<double> selection_chance_rate;
  MemoryBank final_bank;
  MemoryBank source_only_bank;
  ProbeClassifier final_probe;
};

// Sub-seed stages of one iteration, published so stages can be replayed.
namespace stage {
inline constexpr const char* kSpec = "spec";
inline constexpr const char* kBankInit = "bank-init";
inline constexpr const char* kSourceBatch = "source-batch";
inline constexpr const char* kKMeans = "kmeans";
inline constexpr const char* kTargetBatch = "target-batch";
inline constexpr const char* kHeldOut = "held-out-eval";
}  // namespace stage

std::uint64_t kmeans_seed(std::uint64_t master, std::size_t iteration, std::size_t class_label);

struct RunOptions {
  // Continue from a saved bank: iterations start_iteration+1..iterations run
  // with the usual derived seeds. The probe and the source-only baseline bank
  // restart from their initial state.
  std::size_t start_iteration = 0;
  std::optional<MemoryBank> initial_bank;
  std::function<void(std::size_t iter, const MemoryBank& bank)> on_snapshot;
};

/// Runs the full loop: memory-bank update from source, novel selection and
/// refresh, target assignment and prototype refresh, periodic evaluation on a
/// held-out target batch. Errors are rethrown with the iteration and stage.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Nearest-prototype (Euclidean, base classes only) accuracy on the base-truth
/// entries of `batch`. Throws UndefinedMetric if there are none.
double compute_baseline(const MemoryBank& source_only_bank, const LabeledBatch& batch);

std::string metrics_csv(const ExperimentReport& report);
std::string summary_json(const ExperimentConfig& config, const ExperimentReport& report);

// Re-renders a metrics.csv file as a JSON document with one object per row.
std::string csv_to_json(const std::string& csv_text);

}  // namespace ckm
