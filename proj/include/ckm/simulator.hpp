#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ckm/numerics.hpp"

namespace ckm {

enum class Domain { Source, Target };

struct ScoreParams {
  double foreground_low = 0.6;
  double foreground_high = 1.0;
  double background_low = 0.0;
  double background_high = 0.4;

  bool operator==(const ScoreParams&) const = default;
};

struct SpecParams {
  std::size_t num_base_classes = 5;
  std::size_t num_novel_classes = 3;
  std::size_t dim = 32;
  double mean_radius = 10.0;
  double class_spread = 1.0;
  double background_spread = 15.0;
  double shift_magnitude = 2.0;
  double jitter_spread = 0.2;
  // 0 places novel means on the sphere like base means. A positive value
  // anchors each novel class at a random base class mean plus an offset of
  // this length orthogonal to it.
  double novel_offset = 0.0;
  ScoreParams scores;

  bool operator==(const SpecParams&) const = default;
};

// Gaussian class clouds for both domains. Index i of class_means holds class
// label i+1 for base classes (i < C) and novel id i+2 for novel classes.
struct DomainSpec {
  std::size_t dim = 0;
  std::size_t num_base_classes = 0;
  std::size_t num_novel_classes = 0;
  FeatureSet class_means;   // source-domain means, C + C' entries
  FeatureSet target_means;  // class_means + shift_offset + per-class jitter
  double class_spread = 1.0;
  double background_spread = 15.0;
  FeatureVector shift_offset;
  double jitter_spread = 0.0;
  std::vector<std::size_t> novel_anchor;  // base slot each novel class sits next to (empty if unanchored)
  ScoreParams scores;
  std::uint64_t seed_used = 0;  // seed after any separation retries

  bool operator==(const DomainSpec&) const = default;

  std::size_t num_classes() const { return num_base_classes + num_novel_classes; }
  // Ground-truth label of class slot i.
  int label_of_slot(std::size_t i) const;
};

struct BatchSizes {
  std::size_t foreground = 0;
  std::size_t background = 0;
  // Source only: unannotated novel-class objects mixed into the unmatched
  // pool. They carry truth label 0 and their novel id in origin_labels.
  std::size_t unlabeled_novel = 0;
};

struct LabeledBatch {
  FeatureSet features;
  // 0 background, 1..C base, C+2..C+1+C' novel ids. Never a novel id in source.
  std::vector<int> true_labels;
  // Object identity before annotation; differs from true_labels only for
  // unannotated novel objects in source batches.
  std::vector<int> origin_labels;
  Domain domain = Domain::Source;
  std::vector<double> fg_scores;

  std::size_t size() const { return features.size(); }
};

// What detection-side code may see of a batch: no labels.
struct QueryView {
  const FeatureSet& features;
  const std::vector<double>& fg_scores;
};

inline QueryView algorithm_view(const LabeledBatch& batch) {
  return {batch.features, batch.fg_scores};
}

/// Class means on the sphere of radius mean_radius and a shift of length
/// shift_magnitude in a random direction. When two means end up closer than
/// 4 * class_spread the draw is repeated with seed + 1.
DomainSpec make_spec(const SpecParams& params, std::uint64_t seed);

/// Foreground objects come from isotropic Gaussians (uniform over base classes
/// in the source, over base and novel classes in the target), background from
/// a zero-centered Gaussian. Entries are shuffled.
LabeledBatch sample_batch(const DomainSpec& spec, Domain domain, const BatchSizes& sizes,
                          std::uint64_t seed);
LabeledBatch sample_batch(const DomainSpec& spec, Domain domain, std::size_t n_foreground,
                          std::size_t n_background, std::uint64_t seed);

}  // namespace ckm
