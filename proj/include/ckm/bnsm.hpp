#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ckm/memory_bank.hpp"
#include "ckm/numerics.hpp"

namespace ckm {

inline constexpr double kDefaultGamma = 0.65;
inline constexpr std::size_t kDefaultTopK = 5;

// Source connection matrix: one ProtoBall score per (base class, unmatched query).
struct ScmResult {
  std::vector<std::vector<double>> scores;  // C rows x N columns
  std::vector<std::size_t> partner_of;      // farthest partner index per class
  std::vector<double> best_scores;          // columnwise minimum over classes
};

struct NovelSelection {
  std::vector<std::size_t> indices;  // ascending, into the unmatched batch
  FeatureSet features;               // features[i] == unmatched[indices[i]]
};

/// Index j != c of the prototype farthest from prototype c (0-based); the
/// lowest index wins ties.
std::size_t farthest_partner(std::span<const FeatureVector> prototypes, std::size_t c);

/// Dual prototype-ball score of `v` against the pair (m_a, m_b):
///   d = |m_a - m_b|
///   |(|v - m_a| - gamma d) / d| - |(|v - m_b| - gamma d) / d|
/// Antisymmetric in (m_a, m_b) and possibly negative; smaller values mark
/// stronger novel candidates.
double protoball_distance(std::span<const double> v, std::span<const double> m_a,
                          std::span<const double> m_b, double gamma = kDefaultGamma);

ScmResult build_scm(std::span<const FeatureVector> unmatched, const MemoryBank& bank,
                    double gamma = kDefaultGamma);

/// Indices of the K smallest best_scores (lower query index first on ties),
/// returned in ascending index order together with the gathered features.
NovelSelection select_topk(const ScmResult& scm, std::span<const FeatureVector> unmatched,
                           std::size_t k = kDefaultTopK);

/// Novel prototype blends toward the mean of the selected features and, with
/// two or more selections, the novel disparity toward their spread.
MemoryBank update_novel_memory(const MemoryBank& bank, const NovelSelection& selected);

}  // namespace ckm
