#include "ckm/probe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ckm/error.hpp"

namespace ckm {
namespace {

double log_sum_exp(std::span<const double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double x : z) s += std::exp(x - top);
  return top + std::log(s);
}

void check_batch(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                 std::span<const std::size_t> labels) {
  if (features.empty()) fail(Errc::EmptyBatch, "probe batch is empty");
  if (features.size() != labels.size()) {
    fail(Errc::LengthMismatch, "probe batch features and labels differ in length");
  }
  for (std::size_t y : labels) {
    if (y >= probe.num_outputs()) fail(Errc::LabelOutOfRange, "label " + std::to_string(y));
  }
}

}  // namespace

ProbeClassifier make_probe(std::size_t num_outputs, std::size_t dim, double learning_rate,
                           double loss_weight_novel, double loss_weight_adaptive) {
  if (num_outputs < 2 || dim < 1) fail(Errc::InvalidConfig, "probe needs >= 2 outputs and dim >= 1");
  if (!(learning_rate > 0.0)) fail(Errc::InvalidConfig, "learning rate must be positive");
  ProbeClassifier p;
  p.weights.assign(num_outputs, FeatureVector(dim, 0.0));
  p.biases.assign(num_outputs, 0.0);
  p.learning_rate = learning_rate;
  p.loss_weight_novel = loss_weight_novel;
  p.loss_weight_adaptive = loss_weight_adaptive;
  return p;
}

std::vector<double> logits(const ProbeClassifier& probe, std::span<const double> v) {
  if (v.size() != probe.dim()) {
    fail(Errc::DimensionMismatch, "probe dim " + std::to_string(probe.dim()) + ", input " +
                                      std::to_string(v.size()));
  }
  std::vector<double> z(probe.num_outputs());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = dot(probe.weights[k], v) + probe.biases[k];
  return z;
}

std::vector<double> forward_probs(const ProbeClassifier& probe, std::span<const double> v) {
  std::vector<double> z = logits(probe, v);
  const double lse = log_sum_exp(z);
  for (double& x : z) x = std::exp(x - lse);
  return z;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) fail(Errc::LabelOutOfRange, "label " + std::to_string(label));
  return -std::log(probs[label]);
}

double mean_cross_entropy(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                          std::span<const std::size_t> labels) {
  check_batch(probe, features, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::vector<double> z = logits(probe, features[i]);
    total += log_sum_exp(z) - z[labels[i]];
  }
  return total / static_cast<double>(features.size());
}

ProbeGradient loss_gradient(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                            std::span<const std::size_t> labels) {
  check_batch(probe, features, labels);
  const std::size_t outputs = probe.num_outputs();
  const double inv_n = 1.0 / static_cast<double>(features.size());

  ProbeGradient g;
  g.weights.assign(outputs, FeatureVector(probe.dim(), 0.0));
  g.biases.assign(outputs, 0.0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    std::vector<double> residual = forward_probs(probe, features[i]);
    residual[labels[i]] -= 1.0;
    for (std::size_t k = 0; k < outputs; ++k) {
      const double r = residual[k] * inv_n;
      g.biases[k] += r;
      for (std::size_t j = 0; j < probe.dim(); ++j) g.weights[k][j] += r * features[i][j];
    }
  }
  return g;
}

ProbeClassifier sgd_step(const ProbeClassifier& probe, std::span<const FeatureVector> features,
                         std::span<const std::size_t> labels, double weight) {
  const ProbeGradient g = loss_gradient(probe, features, labels);
  const double step = probe.learning_rate * weight;
  ProbeClassifier out = probe;
  for (std::size_t k = 0; k < out.num_outputs(); ++k) {
    out.biases[k] -= step * g.biases[k];
    for (std::size_t j = 0; j < out.dim(); ++j) out.weights[k][j] -= step * g.weights[k][j];
  }
  return out;
}

std::size_t predict(const ProbeClassifier& probe, std::span<const double> v) {
  const std::vector<double> z = logits(probe, v);
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

}  // namespace ckm
