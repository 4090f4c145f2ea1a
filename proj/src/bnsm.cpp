#include "ckm/bnsm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ckm/error.hpp"

namespace ckm {

std::size_t farthest_partner(std::span<const FeatureVector> prototypes, std::size_t c) {
  if (prototypes.size() < 2) fail(Errc::InvalidConfig, "need at least two prototypes");
  if (c >= prototypes.size()) {
    fail(Errc::ClassIndexOutOfRange, "class index " + std::to_string(c));
  }
  std::size_t best = prototypes.size();
  double best_d = -1.0;
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    if (j == c) continue;
    const double d = squared_distance(prototypes[c], prototypes[j]);
    if (d > best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

double protoball_distance(std::span<const double> v, std::span<const double> m_a,
                          std::span<const double> m_b, double gamma) {
  require_same_dim(v, m_a);
  require_same_dim(v, m_b);
  const double d = euclidean_distance(m_a, m_b);
  if (d < kNormFloor) fail(Errc::DegeneratePair, "ProtoBall centers coincide");
  const double radius = gamma * d;
  const double term_a = std::abs((euclidean_distance(v, m_a) - radius) / d);
  const double term_b = std::abs((euclidean_distance(v, m_b) - radius) / d);
  return term_a - term_b;
}

ScmResult build_scm(std::span<const FeatureVector> unmatched, const MemoryBank& bank, double gamma) {
  if (unmatched.empty()) fail(Errc::EmptyBatch, "no unmatched queries");
  const auto& protos = bank.base_prototypes;
  const std::size_t C = protos.size();

  ScmResult out;
  out.partner_of.resize(C);
  for (std::size_t c = 0; c < C; ++c) out.partner_of[c] = farthest_partner(protos, c);

  out.scores.assign(C, std::vector<double>(unmatched.size()));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t n = 0; n < unmatched.size(); ++n) {
      out.scores[c][n] =
          protoball_distance(unmatched[n], protos[c], protos[out.partner_of[c]], gamma);
    }
  }
  out.best_scores = out.scores.front();
  for (std::size_t c = 1; c < C; ++c) {
    for (std::size_t n = 0; n < unmatched.size(); ++n) {
      out.best_scores[n] = std::min(out.best_scores[n], out.scores[c][n]);
    }
  }
  return out;
}

NovelSelection select_topk(const ScmResult& scm, std::span<const FeatureVector> unmatched,
                           std::size_t k) {
  const auto& scores = scm.best_scores;
  if (scores.size() != unmatched.size()) {
    fail(Errc::LengthMismatch, "score vector and unmatched batch differ in length");
  }
  if (k > scores.size()) {
    fail(Errc::KTooLarge,
         "K=" + std::to_string(k) + " exceeds pool size " + std::to_string(scores.size()));
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return scores[a] < scores[b] || (scores[a] == scores[b] && a < b);
                    });
  order.resize(k);
  std::sort(order.begin(), order.end());

  NovelSelection out;
  out.indices = std::move(order);
  for (std::size_t i : out.indices) out.features.push_back(unmatched[i]);
  return out;
}

MemoryBank update_novel_memory(const MemoryBank& bank, const NovelSelection& selected) {
  if (selected.features.empty()) fail(Errc::EmptySelection, "no selected novel candidates");
  MemoryBank out = bank;
  out.novel_prototype =
      momentum_blend(bank.novel_prototype, mean_vector(selected.features), bank.momentum);
  if (selected.features.size() >= 2) {
    const FeatureVector spread = std_vector(selected.features);
    if (norm(spread) >= kNormFloor) {
      out.novel_disparity = momentum_blend(bank.novel_disparity, spread, bank.momentum);
    }
  }
  recompute_novel_aux(out);
  return out;
}

}  // namespace ckm
