#include "ckm/memory_bank.hpp"

#include <string>

#include <json.hpp>

#include "ckm/clustering.hpp"
#include "ckm/error.hpp"
#include "ckm/random.hpp"

namespace ckm {
namespace {

using nlohmann::json;

FeatureVector random_vector(std::size_t dim, Rng& rng) {
  FeatureVector v(dim);
  for (auto& x : v) x = rng.normal();
  return v;
}

void check_vector(const FeatureVector& v, std::size_t dim, const char* field) {
  if (v.size() != dim) {
    fail(Errc::DimensionMismatch, std::string(field) + " has length " + std::to_string(v.size()) +
                                      ", expected " + std::to_string(dim));
  }
  if (!all_finite(v)) fail(Errc::InvalidConfig, std::string(field) + " has non-finite entries");
}

void check_set(const FeatureSet& s, std::size_t count, std::size_t dim, const char* field) {
  if (s.size() != count) {
    fail(Errc::DimensionMismatch, std::string(field) + " holds " + std::to_string(s.size()) +
                                      " vectors, expected " + std::to_string(count));
  }
  for (const auto& v : s) check_vector(v, dim, field);
}

}  // namespace

MemoryBank init_bank(std::size_t num_base_classes, std::size_t dim, std::uint64_t seed,
                     double momentum) {
  if (num_base_classes < 2) fail(Errc::InvalidConfig, "need at least two base classes");
  if (dim < 2) fail(Errc::InvalidConfig, "dim must be at least 2");
  if (!(momentum > 0.0 && momentum <= 1.0)) fail(Errc::InvalidConfig, "momentum must lie in (0, 1]");

  Rng rng(seed);
  MemoryBank bank;
  bank.num_base_classes = num_base_classes;
  bank.dim = dim;
  bank.momentum = momentum;
  for (FeatureSet* set : {&bank.base_prototypes, &bank.base_aux_plus, &bank.base_aux_minus,
                          &bank.base_disparity}) {
    for (std::size_t c = 0; c < num_base_classes; ++c) set->push_back(random_vector(dim, rng));
  }
  bank.novel_prototype = random_vector(dim, rng);
  bank.novel_disparity = random_vector(dim, rng);
  recompute_novel_aux(bank);
  return bank;
}

FeatureVector momentum_blend(std::span<const double> old_value, std::span<const double> new_value,
                             double beta) {
  const double w = beta * cosine_similarity(new_value, old_value);
  FeatureVector out(old_value.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = old_value[i] + w * (new_value[i] - old_value[i]);
  }
  return out;
}

void recompute_novel_aux(MemoryBank& bank) {
  bank.novel_aux_plus = add(bank.novel_prototype, bank.novel_disparity);
  bank.novel_aux_minus = subtract(bank.novel_prototype, bank.novel_disparity);
}

MemoryBank update_base_class(const MemoryBank& bank, std::size_t class_label,
                             std::span<const FeatureVector> matched, std::uint64_t seed) {
  if (class_label < 1 || class_label > bank.num_base_classes) {
    fail(Errc::ClassIndexOutOfRange, "base class label " + std::to_string(class_label));
  }
  for (const auto& v : matched) {
    if (v.size() != bank.dim) fail(Errc::DimensionMismatch, "matched feature dimension");
  }
  if (matched.empty()) return bank;

  const std::size_t c = class_label - 1;
  const double beta = bank.momentum;
  MemoryBank out = bank;

  if (matched.size() == 1) {
    out.base_prototypes[c] = momentum_blend(bank.base_prototypes[c], matched.front(), beta);
    return out;
  }

  FeatureSet points(matched.begin(), matched.end());
  points.push_back(bank.base_prototypes[c]);
  const Clustering clusters = kmeans(points, 3, seed);
  const std::size_t home = cluster_of_point(clusters, points.size() - 1);

  out.base_prototypes[c] = momentum_blend(bank.base_prototypes[c], clusters.centroids[home], beta);

  std::size_t first = 3;
  std::size_t second = 3;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k == home) continue;
    (first == 3 ? first : second) = k;
  }
  const double cos_first = cosine_similarity(clusters.centroids[first], out.base_prototypes[c]);
  const double cos_second = cosine_similarity(clusters.centroids[second], out.base_prototypes[c]);
  if (cos_second > cos_first) std::swap(first, second);
  out.base_aux_plus[c] = clusters.centroids[first];
  out.base_aux_minus[c] = clusters.centroids[second];

  // A batch of identical features has zero spread and no direction to blend
  // toward; the disparity keeps its previous value in that case.
  const FeatureVector spread = std_vector(matched);
  if (norm(spread) >= kNormFloor) {
    out.base_disparity[c] = momentum_blend(bank.base_disparity[c], spread, beta);
  }
  return out;
}

MemoryBank refresh_novel_from_base(const MemoryBank& bank) {
  MemoryBank out = bank;
  out.novel_prototype =
      momentum_blend(bank.novel_prototype, mean_vector(bank.base_prototypes), bank.momentum);
  out.novel_disparity =
      momentum_blend(bank.novel_disparity, mean_vector(bank.base_disparity), bank.momentum);
  recompute_novel_aux(out);
  return out;
}

void validate_bank(const MemoryBank& bank) {
  if (bank.num_base_classes < 2) fail(Errc::InvalidConfig, "need at least two base classes");
  if (bank.dim < 2) fail(Errc::InvalidConfig, "dim must be at least 2");
  if (!(bank.momentum > 0.0 && bank.momentum <= 1.0)) {
    fail(Errc::InvalidConfig, "momentum must lie in (0, 1]");
  }
  const std::size_t C = bank.num_base_classes;
  check_set(bank.base_prototypes, C, bank.dim, "base_prototypes");
  check_set(bank.base_aux_plus, C, bank.dim, "base_aux_plus");
  check_set(bank.base_aux_minus, C, bank.dim, "base_aux_minus");
  check_set(bank.base_disparity, C, bank.dim, "base_disparity");
  check_vector(bank.novel_prototype, bank.dim, "novel_prototype");
  check_vector(bank.novel_aux_plus, bank.dim, "novel_aux_plus");
  check_vector(bank.novel_aux_minus, bank.dim, "novel_aux_minus");
  check_vector(bank.novel_disparity, bank.dim, "novel_disparity");
}

std::string snapshot(const MemoryBank& bank) {
  json doc;
  doc["version"] = kSnapshotVersion;
  doc["C"] = bank.num_base_classes;
  doc["dim"] = bank.dim;
  doc["momentum"] = bank.momentum;
  doc["base_prototypes"] = bank.base_prototypes;
  doc["base_aux_plus"] = bank.base_aux_plus;
  doc["base_aux_minus"] = bank.base_aux_minus;
  doc["base_disparity"] = bank.base_disparity;
  doc["novel_prototype"] = bank.novel_prototype;
  doc["novel_aux_plus"] = bank.novel_aux_plus;
  doc["novel_aux_minus"] = bank.novel_aux_minus;
  doc["novel_disparity"] = bank.novel_disparity;
  return doc.dump();
}

MemoryBank load_snapshot(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    fail(Errc::MalformedSnapshot, e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_string()) {
    fail(Errc::MalformedSnapshot, "missing version field");
  }
  const auto version = doc["version"].get<std::string>();
  if (version != kSnapshotVersion) {
    fail(Errc::VersionMismatch,
         "snapshot version " + version + ", expected " + std::string(kSnapshotVersion));
  }

  MemoryBank bank;
  try {
    bank.num_base_classes = doc.at("C").get<std::size_t>();
    bank.dim = doc.at("dim").get<std::size_t>();
    bank.momentum = doc.at("momentum").get<double>();
    bank.base_prototypes = doc.at("base_prototypes").get<FeatureSet>();
    bank.base_aux_plus = doc.at("base_aux_plus").get<FeatureSet>();
    bank.base_aux_minus = doc.at("base_aux_minus").get<FeatureSet>();
    bank.base_disparity = doc.at("base_disparity").get<FeatureSet>();
    bank.novel_prototype = doc.at("novel_prototype").get<FeatureVector>();
    bank.novel_aux_plus = doc.at("novel_aux_plus").get<FeatureVector>();
    bank.novel_aux_minus = doc.at("novel_aux_minus").get<FeatureVector>();
    bank.novel_disparity = doc.at("novel_disparity").get<FeatureVector>();
  } catch (const json::exception& e) {
    fail(Errc::MalformedSnapshot, e.what());
  }
  try {
    validate_bank(bank);
  } catch (const Error& e) {
    fail(Errc::MalformedSnapshot, e.what());
  }
  return bank;
}

}  // namespace ckm
