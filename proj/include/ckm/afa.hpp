#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ckm/memory_bank.hpp"
#include "ckm/numerics.hpp"

namespace ckm {

inline constexpr double kDefaultForegroundThreshold = 0.5;

struct ForegroundSelection {
  FeatureSet features;
  std::vector<std::size_t> indices;  // positions in the unfiltered batch
};

// Target connection matrix against the class auxiliaries.
struct TcmResult {
  std::vector<std::vector<double>> scores;  // (C+1) rows x N columns; row C is the novel class
  std::vector<std::size_t> assigned_labels;  // class labels 1..C+1
};

/// Keeps entries whose score is strictly greater than `threshold`, in order.
ForegroundSelection filter_foreground(std::span<const FeatureVector> features,
                                      std::span<const double> scores,
                                      double threshold = kDefaultForegroundThreshold);

// |v - (a+ + a-)/2| / max(|a+ - a-|, 1e-12)
double auxiliary_score(std::span<const double> v, std::span<const double> aux_plus,
                       std::span<const double> aux_minus);

/// Scores every kept feature against each class's auxiliary pair (base rows
/// 1..C, then the novel pair) and labels it with the argmin class.
TcmResult build_tcm(std::span<const FeatureVector> kept, const MemoryBank& bank);

/// Per-class prototype refresh from target features carrying labels 1..C+1:
/// each class with at least one feature blends its prototype toward the mean
/// of those features. Classes without features keep their prototype.
MemoryBank update_prototypes_from_target(const MemoryBank& bank, std::span<const FeatureVector> kept,
                                         std::span<const std::size_t> labels);

}  // namespace ckm
