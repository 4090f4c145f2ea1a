#include "ckm/simulator.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ckm/error.hpp"
#include "ckm/random.hpp"

namespace ckm {
namespace {

constexpr int kMaxSeparationRetries = 1000;

FeatureVector random_direction(std::size_t dim, Rng& rng) {
  FeatureVector v(dim);
  double n = 0.0;
  while (n < kNormFloor) {
    for (auto& x : v) x = rng.normal();
    n = norm(v);
  }
  for (auto& x : v) x /= n;
  return v;
}

FeatureVector gaussian_around(std::span<const double> center, double spread, Rng& rng) {
  FeatureVector v(center.begin(), center.end());
  for (auto& x : v) x += spread * rng.normal();
  return v;
}

void validate_params(const SpecParams& p) {
  if (p.num_base_classes < 2) fail(Errc::InvalidConfig, "need at least two base classes");
  if (p.num_novel_classes < 1) fail(Errc::InvalidConfig, "need at least one novel class");
  if (p.dim < 2) fail(Errc::InvalidConfig, "dim must be at least 2");
  if (!(p.mean_radius > 0.0)) fail(Errc::InvalidConfig, "mean_radius must be positive");
  if (!(p.class_spread > 0.0) || !(p.background_spread > 0.0)) {
    fail(Errc::InvalidConfig, "spreads must be positive");
  }
  if (!(p.novel_offset >= 0.0)) fail(Errc::InvalidConfig, "novel_offset must be non-negative");
  if (!(p.shift_magnitude >= 0.0) || !(p.jitter_spread >= 0.0)) {
    fail(Errc::InvalidConfig, "shift_magnitude and jitter_spread must be non-negative");
  }
  const auto& s = p.scores;
  if (!(0.0 <= s.foreground_low && s.foreground_low <= s.foreground_high && s.foreground_high <= 1.0) ||
      !(0.0 <= s.background_low && s.background_low <= s.background_high && s.background_high <= 1.0)) {
    fail(Errc::InvalidConfig, "score ranges must be ordered within [0, 1]");
  }
}

double min_pairwise_distance(const FeatureSet& means) {
  double best = INFINITY;
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      best = std::min(best, euclidean_distance(means[i], means[j]));
    }
  }
  return best;
}

DomainSpec draw_spec(const SpecParams& p, std::uint64_t seed) {
  Rng rng(seed);
  DomainSpec spec;
  spec.dim = p.dim;
  spec.num_base_classes = p.num_base_classes;
  spec.num_novel_classes = p.num_novel_classes;
  spec.class_spread = p.class_spread;
  spec.background_spread = p.background_spread;
  spec.jitter_spread = p.jitter_spread;
  spec.scores = p.scores;
  spec.seed_used = seed;

  const std::size_t total = p.num_base_classes + p.num_novel_classes;
  for (std::size_t i = 0; i < total; ++i) {
    spec.class_means.push_back(scaled(random_direction(p.dim, rng), p.mean_radius));
  }
  if (p.novel_offset > 0.0) {
    for (std::size_t j = 0; j < p.num_novel_classes; ++j) {
      const std::size_t anchor = static_cast<std::size_t>(rng.below(p.num_base_classes));
      const FeatureVector& base = spec.class_means[anchor];
      FeatureVector dir = random_direction(p.dim, rng);
      const double along = dot(dir, base) / dot(base, base);
      for (std::size_t k = 0; k < p.dim; ++k) dir[k] -= along * base[k];
      dir = scaled(dir, p.novel_offset / norm(dir));
      spec.class_means[p.num_base_classes + j] = add(base, dir);
      spec.novel_anchor.push_back(anchor);
    }
  }
  spec.shift_offset = scaled(random_direction(p.dim, rng), p.shift_magnitude);

  // Per-coordinate std jitter/sqrt(dim) gives a perturbation of expected
  // length about jitter_spread.
  const double per_coord = p.jitter_spread / std::sqrt(static_cast<double>(p.dim));
  for (const auto& m : spec.class_means) {
    FeatureVector t = add(m, spec.shift_offset);
    for (auto& x : t) x += per_coord * rng.normal();
    spec.target_means.push_back(std::move(t));
  }
  return spec;
}

}  // namespace

int DomainSpec::label_of_slot(std::size_t i) const {
  if (i < num_base_classes) return static_cast<int>(i) + 1;
  return static_cast<int>(i) + 2;
}

DomainSpec make_spec(const SpecParams& params, std::uint64_t seed) {
  validate_params(params);
  for (int attempt = 0; attempt < kMaxSeparationRetries; ++attempt) {
    DomainSpec spec = draw_spec(params, seed + static_cast<std::uint64_t>(attempt));
    if (min_pairwise_distance(spec.class_means) > 4.0 * params.class_spread) return spec;
  }
  fail(Errc::InvalidConfig, "could not separate class means; raise mean_radius or lower class_spread");
}

LabeledBatch sample_batch(const DomainSpec& spec, Domain domain, const BatchSizes& sizes,
                          std::uint64_t seed) {
  const std::size_t n = sizes.foreground + sizes.background + sizes.unlabeled_novel;
  if (n == 0) fail(Errc::InvalidConfig, "batch must hold at least one entry");
  if (domain == Domain::Target && sizes.unlabeled_novel != 0) {
    fail(Errc::InvalidConfig, "target batches label novel objects as foreground");
  }

  Rng rng(seed);
  const auto& means = domain == Domain::Source ? spec.class_means : spec.target_means;
  const std::size_t fg_classes =
      domain == Domain::Source ? spec.num_base_classes : spec.num_classes();
  const ScoreParams& sp = spec.scores;

  LabeledBatch raw;
  raw.domain = domain;
  auto push = [&](FeatureVector f, int truth, int origin, double score) {
    raw.features.push_back(std::move(f));
    raw.true_labels.push_back(truth);
    raw.origin_labels.push_back(origin);
    raw.fg_scores.push_back(score);
  };

  for (std::size_t i = 0; i < sizes.foreground; ++i) {
    const std::size_t slot = static_cast<std::size_t>(rng.below(fg_classes));
    const int label = spec.label_of_slot(slot);
    push(gaussian_around(means[slot], spec.class_spread, rng), label, label,
         rng.uniform(sp.foreground_low, sp.foreground_high));
  }
  const FeatureVector origin(spec.dim, 0.0);
  for (std::size_t i = 0; i < sizes.background; ++i) {
    push(gaussian_around(origin, spec.background_spread, rng), 0, 0,
         rng.uniform(sp.background_low, sp.background_high));
  }
  for (std::size_t i = 0; i < sizes.unlabeled_novel; ++i) {
    const std::size_t slot =
        spec.num_base_classes + static_cast<std::size_t>(rng.below(spec.num_novel_classes));
    push(gaussian_around(means[slot], spec.class_spread, rng), 0, spec.label_of_slot(slot),
         rng.uniform(sp.foreground_low, sp.foreground_high));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
  }

  LabeledBatch out;
  out.domain = domain;
  for (std::size_t i : order) {
    out.features.push_back(std::move(raw.features[i]));
    out.true_labels.push_back(raw.true_labels[i]);
    out.origin_labels.push_back(raw.origin_labels[i]);
    out.fg_scores.push_back(raw.fg_scores[i]);
  }
  return out;
}

LabeledBatch sample_batch(const DomainSpec& spec, Domain domain, std::size_t n_foreground,
                          std::size_t n_background, std::uint64_t seed) {
  return sample_batch(spec, domain, BatchSizes{n_foreground, n_background, 0}, seed);
}

}  // namespace ckm
