#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ckm/numerics.hpp"

namespace ckm {

struct Clustering {
  std::vector<std::size_t> assignments;  // one cluster index per input point
  FeatureSet centroids;                  // k centroids, each the mean of its members
  double inertia = 0.0;                  // sum of squared point-to-centroid distances
};

inline constexpr std::size_t kDefaultKMeansMaxIters = 100;
inline constexpr double kDefaultKMeansTol = 1e-6;

/// Lloyd's algorithm with greedy k-means++ seeding drawn from `seed`.
///
/// Stops once the largest centroid shift of a round falls below `tol`, or
/// after `max_iters` rounds. Points equidistant from several centroids go to
/// the lowest-index one. A cluster left empty after assignment receives the
/// point farthest from its own centroid (taken from a cluster with at least
/// two members), so all k clusters are populated on return.
Clustering kmeans(std::span<const FeatureVector> points, std::size_t k, std::uint64_t seed,
                  std::size_t max_iters = kDefaultKMeansMaxIters, double tol = kDefaultKMeansTol);

std::size_t cluster_of_point(const Clustering& clustering, std::size_t point_index);

// Index of the centroid closest to `point`; ties go to the lowest index.
std::size_t nearest_centroid(std::span<const double> point, std::span<const FeatureVector> centroids);

double clustering_inertia(std::span<const FeatureVector> points, const Clustering& clustering);

}  // namespace ckm
