#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "ckm/afa.hpp"
#include "ckm/bnsm.hpp"
#include "ckm/memory_bank.hpp"
#include "ckm/probe.hpp"
#include "ckm/simulator.hpp"

namespace ckm {

struct ExperimentConfig {
  SpecParams spec;
  std::size_t iterations = 200;

  std::size_t source_foreground = 40;
  std::size_t source_background = 30;
  std::size_t source_novel = 10;
  std::size_t target_foreground = 40;
  std::size_t target_background = 30;
  std::size_t eval_foreground = 400;
  std::size_t eval_background = 200;

  double gamma = kDefaultGamma;
  std::size_t top_k = kDefaultTopK;
  double beta = kDefaultMomentum;
  double fg_threshold = kDefaultForegroundThreshold;
  double learning_rate = 0.05;
  double lambda_novel = kDefaultNovelLossWeight;
  double lambda_adaptive = kDefaultAdaptiveLossWeight;

  std::uint64_t seed = 42;
  std::size_t eval_every = 20;
  std::size_t snapshot_every = 0;
  std::string out_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws InvalidConfig naming the first offending field.
void validate_config(const ExperimentConfig& config);

/// Parses the JSON config document. Every key is optional and falls back to
/// the default above; unknown keys are rejected with InvalidConfig.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

}  // namespace ckm
