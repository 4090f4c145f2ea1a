#include "ckm/afa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ckm/error.hpp"

namespace ckm {

ForegroundSelection filter_foreground(std::span<const FeatureVector> features,
                                      std::span<const double> scores, double threshold) {
  if (features.size() != scores.size()) {
    fail(Errc::LengthMismatch, std::to_string(features.size()) + " features, " +
                                   std::to_string(scores.size()) + " scores");
  }
  ForegroundSelection out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (scores[i] > threshold) {
      out.features.push_back(features[i]);
      out.indices.push_back(i);
    }
  }
  return out;
}

double auxiliary_score(std::span<const double> v, std::span<const double> aux_plus,
                       std::span<const double> aux_minus) {
  require_same_dim(v, aux_plus);
  require_same_dim(v, aux_minus);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // Swapping aux_plus and aux_minus leaves both sums bitwise unchanged.
    const double mid = (aux_plus[i] + aux_minus[i]) / 2.0;
    const double gap = aux_plus[i] - aux_minus[i];
    num += (v[i] - mid) * (v[i] - mid);
    den += gap * gap;
  }
  return std::sqrt(num) / std::max(std::sqrt(den), kNormFloor);
}

TcmResult build_tcm(std::span<const FeatureVector> kept, const MemoryBank& bank) {
  if (kept.empty()) fail(Errc::EmptyBatch, "no foreground features");
  const std::size_t C = bank.num_base_classes;

  TcmResult out;
  out.scores.assign(C + 1, std::vector<double>(kept.size()));
  for (std::size_t n = 0; n < kept.size(); ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      out.scores[c][n] = auxiliary_score(kept[n], bank.base_aux_plus[c], bank.base_aux_minus[c]);
    }
    out.scores[C][n] = auxiliary_score(kept[n], bank.novel_aux_plus, bank.novel_aux_minus);
  }

  out.assigned_labels.resize(kept.size());
  for (std::size_t n = 0; n < kept.size(); ++n) {
    std::size_t best = 0;
    for (std::size_t row = 1; row <= C; ++row) {
      if (out.scores[row][n] < out.scores[best][n]) best = row;
    }
    out.assigned_labels[n] = best + 1;
  }
  return out;
}

MemoryBank update_prototypes_from_target(const MemoryBank& bank, std::span<const FeatureVector> kept,
                                         std::span<const std::size_t> labels) {
  if (kept.size() != labels.size()) {
    fail(Errc::LengthMismatch, std::to_string(kept.size()) + " features, " +
                                   std::to_string(labels.size()) + " labels");
  }
  const std::size_t C = bank.num_base_classes;
  std::vector<FeatureSet> members(C + 1);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (labels[i] < 1 || labels[i] > C + 1) {
      fail(Errc::LabelOutOfRange, "target label " + std::to_string(labels[i]));
    }
    members[labels[i] - 1].push_back(kept[i]);
  }

  MemoryBank out = bank;
  for (std::size_t c = 0; c < C; ++c) {
    if (members[c].empty()) continue;
    out.base_prototypes[c] =
        momentum_blend(bank.base_prototypes[c], mean_vector(members[c]), bank.momentum);
  }
  if (!members[C].empty()) {
    out.novel_prototype =
        momentum_blend(bank.novel_prototype, mean_vector(members[C]), bank.momentum);
    recompute_novel_aux(out);
  }
  return out;
}

}  // namespace ckm
