#include "ckm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ckm/error.hpp"
#include "ckm/random.hpp"

namespace ckm {
namespace {

std::size_t sample_by_weight(std::span<const double> weights, double total, Rng& rng) {
  const double r = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (acc > r) return i;
  }
  return last_positive;
}

FeatureSet seed_centroids(std::span<const FeatureVector> points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

  std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(n))};
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = squared_distance(points[i], points[chosen[0]]);

  std::vector<double> candidate_dist(n);
  while (chosen.size() < k) {
    double total = 0.0;
    for (double d : closest) total += d;

    if (total <= 0.0) {
      // Every point coincides with a chosen center; fall back to index order.
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
          chosen.push_back(i);
          break;
        }
      }
      continue;
    }

    std::size_t best = n;
    double best_potential = 0.0;
    std::vector<double> best_dist;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t cand = sample_by_weight(closest, total, rng);
      double potential = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        candidate_dist[i] = std::min(closest[i], squared_distance(points[i], points[cand]));
        potential += candidate_dist[i];
      }
      if (best == n || potential < best_potential) {
        best = cand;
        best_potential = potential;
        best_dist = candidate_dist;
      }
    }
    chosen.push_back(best);
    closest = std::move(best_dist);
  }

  FeatureSet centroids;
  centroids.reserve(k);
  for (std::size_t idx : chosen) centroids.push_back(points[idx]);
  return centroids;
}

void assign_all(std::span<const FeatureVector> points, std::span<const FeatureVector> centroids,
                std::vector<std::size_t>& assignments) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    assignments[i] = nearest_centroid(points[i], centroids);
  }
}

void repair_empty_clusters(std::span<const FeatureVector> points,
                           std::span<const FeatureVector> centroids, std::size_t k,
                           std::vector<std::size_t>& assignments) {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignments) ++sizes[a];

  for (std::size_t empty = 0; empty < k; ++empty) {
    if (sizes[empty] != 0) continue;
    std::size_t donor = points.size();
    double farthest = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[assignments[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[assignments[i]]);
      if (d > farthest) {
        farthest = d;
        donor = i;
      }
    }
    // |points| >= k guarantees a cluster with two or more members exists.
    --sizes[assignments[donor]];
    assignments[donor] = empty;
    sizes[empty] = 1;
  }
}

FeatureSet cluster_means(std::span<const FeatureVector> points,
                         std::span<const std::size_t> assignments, std::size_t k) {
  std::vector<FeatureSet> members(k);
  for (std::size_t i = 0; i < points.size(); ++i) members[assignments[i]].push_back(points[i]);
  FeatureSet means;
  means.reserve(k);
  for (const auto& m : members) means.push_back(mean_vector(m));
  return means;
}

}  // namespace

std::size_t nearest_centroid(std::span<const double> point, std::span<const FeatureVector> centroids) {
  std::size_t best = 0;
  double best_d = squared_distance(point, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double clustering_inertia(std::span<const FeatureVector> points, const Clustering& clustering) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += squared_distance(points[i], clustering.centroids[clustering.assignments[i]]);
  }
  return s;
}

Clustering kmeans(std::span<const FeatureVector> points, std::size_t k, std::uint64_t seed,
                  std::size_t max_iters, double tol) {
  if (k == 0) fail(Errc::InvalidConfig, "k must be positive");
  if (max_iters == 0 || !(tol > 0.0)) fail(Errc::InvalidConfig, "max_iters and tol must be positive");
  if (points.size() < k) {
    fail(Errc::TooFewPoints,
         std::to_string(points.size()) + " points for k=" + std::to_string(k));
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) fail(Errc::DimensionMismatch, "kmeans points differ in dimension");
  }

  Rng rng(seed);
  Clustering out;
  out.centroids = seed_centroids(points, k, rng);
  out.assignments.assign(points.size(), 0);

  for (std::size_t round = 0; round < max_iters; ++round) {
    assign_all(points, out.centroids, out.assignments);
    repair_empty_clusters(points, out.centroids, k, out.assignments);
    FeatureSet next = cluster_means(points, out.assignments, k);
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, euclidean_distance(next[c], out.centroids[c]));
    }
    out.centroids = std::move(next);
    if (shift < tol) break;
  }
  out.inertia = clustering_inertia(points, out);
  return out;
}

std::size_t cluster_of_point(const Clustering& clustering, std::size_t point_index) {
  if (point_index >= clustering.assignments.size()) {
    fail(Errc::IndexOutOfRange, "point index " + std::to_string(point_index) + " of " +
                                    std::to_string(clustering.assignments.size()));
  }
  return clustering.assignments[point_index];
}

}  // namespace ckm
