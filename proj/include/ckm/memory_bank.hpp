#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ckm/numerics.hpp"

namespace ckm {

inline constexpr double kDefaultMomentum = 0.01;
inline constexpr std::string_view kSnapshotVersion = "v1";

// Category-level memory: C base classes plus one unified novel class.
//
// Base vectors are indexed by class index 0..C-1 (class label c is stored at
// c-1). The novel auxiliaries always satisfy
//   novel_aux_plus  == novel_prototype + novel_disparity
//   novel_aux_minus == novel_prototype - novel_disparity
// after any operation in this library returns.
struct MemoryBank {
  std::size_t num_base_classes = 0;
  std::size_t dim = 0;
  double momentum = kDefaultMomentum;

  FeatureSet base_prototypes;
  FeatureSet base_aux_plus;
  FeatureSet base_aux_minus;
  FeatureSet base_disparity;

  FeatureVector novel_prototype;
  FeatureVector novel_aux_plus;
  FeatureVector novel_aux_minus;
  FeatureVector novel_disparity;

  bool operator==(const MemoryBank&) const = default;
};

/// Every vector drawn elementwise from a standard normal seeded by `seed`.
MemoryBank init_bank(std::size_t num_base_classes, std::size_t dim, std::uint64_t seed,
                     double momentum = kDefaultMomentum);

/// Cosine-scaled momentum update:
///   w = beta * cos(new, old);  result = w * new + (1 - w) * old
/// evaluated as old + w * (new - old). The weight is not clamped, so a negative
/// cosine pushes the result away from `new`.
FeatureVector momentum_blend(std::span<const double> old_value, std::span<const double> new_value,
                             double beta);

/// Clustering-based update of one base class from its matched source features.
///
/// `class_label` is 1..C. With two or more matched features the prototype is
/// appended to them and split into three k-means clusters; the cluster holding
/// the prototype drives the prototype blend, the other two cluster means
/// become the auxiliaries ("+" is the one with higher cosine similarity to the
/// updated prototype, lower cluster index on ties) and the disparity blends
/// toward the batch standard deviation. A single matched feature only moves
/// the prototype. No matched features leaves the bank unchanged.
MemoryBank update_base_class(const MemoryBank& bank, std::size_t class_label,
                             std::span<const FeatureVector> matched, std::uint64_t seed);

/// Novel prototype and disparity blend toward the means of the base
/// prototypes and base disparities; the novel auxiliaries are then rebuilt.
MemoryBank refresh_novel_from_base(const MemoryBank& bank);

// Rebuilds novel_aux_plus/minus from novel_prototype and novel_disparity.
void recompute_novel_aux(MemoryBank& bank);

// Throws DimensionMismatch or InvalidConfig if shapes or values are off.
void validate_bank(const MemoryBank& bank);

/// Versioned JSON document; numbers are written with round-trip precision so
/// load_snapshot(snapshot(b)) == b bitwise.
std::string snapshot(const MemoryBank& bank);
MemoryBank load_snapshot(std::string_view document);

}  // namespace ckm
