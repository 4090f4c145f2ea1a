#include "ckm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ckm/error.hpp"

namespace ckm {
namespace {

// Sorting the addends before a Neumaier sum makes the result a function of the
// multiset of values, so any permutation of the inputs gives the same bits.
double order_free_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

void require_uniform_dim(std::span<const FeatureVector> xs) {
  const std::size_t dim = xs.front().size();
  for (const auto& x : xs) {
    if (x.size() != dim) {
      fail(Errc::DimensionMismatch,
           "expected dim " + std::to_string(dim) + ", got " + std::to_string(x.size()));
    }
  }
}

}  // namespace

void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(Errc::DimensionMismatch,
         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kNormFloor || nb < kNormFloor) {
    fail(Errc::ZeroNorm, "cosine similarity of a zero-norm vector");
  }
  // a.b and b.a are the same sum in the same order, so the result is symmetric.
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

FeatureVector mean_vector(std::span<const FeatureVector> xs) {
  if (xs.empty()) fail(Errc::EmptyInput, "mean of an empty set");
  require_uniform_dim(xs);
  const std::size_t dim = xs.front().size();
  const double n = static_cast<double>(xs.size());
  FeatureVector out(dim);
  std::vector<double> column(xs.size());
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) column[i] = xs[i][j];
    out[j] = order_free_sum(column) / n;
  }
  return out;
}

FeatureVector std_vector(std::span<const FeatureVector> xs) {
  if (xs.size() < 2) fail(Errc::TooFewSamples, "std needs at least two samples");
  const FeatureVector mu = mean_vector(xs);
  const double n = static_cast<double>(xs.size());
  FeatureVector out(mu.size());
  std::vector<double> column(xs.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = xs[i][j] - mu[j];
      column[i] = d * d;
    }
    out[j] = std::sqrt(order_free_sum(column) / n);
  }
  return out;
}

FeatureVector add(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  FeatureVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

FeatureVector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  FeatureVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

FeatureVector scaled(std::span<const double> a, double s) {
  FeatureVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

}  // namespace ckm
