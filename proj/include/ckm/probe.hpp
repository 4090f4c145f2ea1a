#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ckm/numerics.hpp"

namespace ckm {

inline constexpr double kDefaultNovelLossWeight = 1e-4;
inline constexpr double kDefaultAdaptiveLossWeight = 1e-1;

// Linear softmax classifier over C+1 outputs (base classes then the unified
// novel class). Output index i corresponds to class label i+1.
struct ProbeClassifier {
  FeatureSet weights;           // (C+1) rows of length dim
  std::vector<double> biases;   // C+1
  double learning_rate = 0.1;
  double loss_weight_novel = kDefaultNovelLossWeight;
  double loss_weight_adaptive = kDefaultAdaptiveLossWeight;

  std::size_t num_outputs() const { return biases.size(); }
  std::size_t dim() const { return weights.empty() ? 0 : weights.front().size(); }

  bool operator==(const ProbeClassifier&) const = default;
};

struct ProbeGradient {
  FeatureSet weights;
  std::vector<double> biases;
};

// Zero weights and biases.
ProbeClassifier make_probe(std::size_t num_outputs, std::size_t dim, double learning_rate,
                           double loss_weight_novel = kDefaultNovelLossWeight,
                           double loss_weight_adaptive = kDefaultAdaptiveLossWeight);

std::vector<double> logits(const ProbeClassifier& probe, std::span<const double> v);

/// softmax(W v + b) through a max-shifted log-sum-exp.
std::vector<double> forward_probs(const ProbeClassifier& probe, std::span<const double> v);

/// -log(probs[label]) for a 0-based output index.
double cross_entropy(std::span<const double> probs, std::size_t label);

// Mean cross entropy over a batch, computed from logits so it stays finite.
double mean_cross_entropy(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                          std::span<const std::size_t> labels);

// Gradient of mean_cross_entropy with respect to weights and biases.
ProbeGradient loss_gradient(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                            std::span<const std::size_t> labels);

/// One full-batch descent step on weight * mean cross entropy.
ProbeClassifier sgd_step(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                         std::span<const std::size_t> labels, double weight);

// Output index with the largest probability (lowest index on ties).
std::size_t predict(const ProbeClassifier& probe, std::span<const double> v);

}  // namespace ckm
