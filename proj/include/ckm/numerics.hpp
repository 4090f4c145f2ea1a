#pragma once

#include <span>
#include <vector>

namespace ckm {

// One object-query embedding. Length is the configured dim; entries finite.
using FeatureVector = std::vector<double>;
using FeatureSet = std::vector<FeatureVector>;

inline constexpr double kNormFloor = 1e-12;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Cosine similarity clamped to [-1, 1]. Throws ZeroNorm when either norm is
/// below 1e-12 and DimensionMismatch on unequal lengths.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Coordinatewise arithmetic mean. The result is bitwise independent of the
/// order of `xs`.
FeatureVector mean_vector(std::span<const FeatureVector> xs);

/// Coordinatewise population standard deviation (divides by n). Needs n >= 2.
FeatureVector std_vector(std::span<const FeatureVector> xs);

FeatureVector add(std::span<const double> a, std::span<const double> b);
FeatureVector subtract(std::span<const double> a, std::span<const double> b);
FeatureVector scaled(std::span<const double> a, double s);

void require_same_dim(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

}  // namespace ckm
