#include <doctest.h>

#include <cmath>

#include "ckm/afa.hpp"
#include "ckm/clustering.hpp"
#include "ckm/memory_bank.hpp"
#include "ckm/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ckm;

namespace {

void check_novel_aux(const MemoryBank& b) {
  for (std::size_t d = 0; d < b.dim; ++d) {
    CHECK(std::abs(b.novel_aux_plus[d] - (b.novel_prototype[d] + b.novel_disparity[d])) <= 1e-12);
    CHECK(std::abs(b.novel_aux_minus[d] - (b.novel_prototype[d] - b.novel_disparity[d])) <= 1e-12);
  }
}

bool close(const FeatureVector& a, const FeatureVector& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

FeatureVector random_vec(Rng& rng, std::size_t dim) {
  FeatureVector v(dim);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("init is deterministic and consistent") {
  const MemoryBank a = init_bank(5, 32, 42, 0.01);
  const MemoryBank b = init_bank(5, 32, 42, 0.01);
  CHECK(a == b);
  CHECK(a.base_prototypes.size() == 5);
  CHECK(a.novel_aux_plus == add(a.novel_prototype, a.novel_disparity));
  check_novel_aux(a);
  CHECK(init_bank(5, 32, 43, 0.01) != a);
  CHECK(thrown_code([] { init_bank(1, 32, 0, 0.01); }) == Errc::InvalidConfig);
  CHECK(thrown_code([] { init_bank(2, 1, 0, 0.01); }) == Errc::InvalidConfig);
  CHECK(thrown_code([] { init_bank(2, 4, 0, 0.0); }) == Errc::InvalidConfig);
  CHECK(thrown_code([] { init_bank(2, 4, 0, 1.5); }) == Errc::InvalidConfig);
}

TEST_CASE("momentum blend hand values") {
  CHECK(momentum_blend(FeatureVector{1, 0}, FeatureVector{1, 0}, 0.01) == FeatureVector{1, 0});
  CHECK(momentum_blend(FeatureVector{1, 0}, FeatureVector{0, 1}, 0.01) == FeatureVector{1, 0});
  const auto r = momentum_blend(FeatureVector{1, 0}, FeatureVector{0.6, 0.8}, 0.5);
  CHECK(r[0] == doctest::Approx(0.88).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(0.24).epsilon(1e-14));
  CHECK(thrown_code([] { momentum_blend(FeatureVector{0, 0}, FeatureVector{1, 0}, 0.5); }) ==
        Errc::ZeroNorm);
}

TEST_CASE("momentum blend properties") {
  Rng rng(17);
  int positive_pairs = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto old_v = random_vec(rng, 6);
    const auto new_v = random_vec(rng, 6);
    const double beta = rng.uniform(0.001, 1.0);
    const auto out = momentum_blend(old_v, new_v, beta);
    if (cosine_similarity(new_v, old_v) >= 0.0) {
      ++positive_pairs;
      for (std::size_t d = 0; d < 6; ++d) {
        CHECK(out[d] >= std::min(old_v[d], new_v[d]) - 1e-12);
        CHECK(out[d] <= std::max(old_v[d], new_v[d]) + 1e-12);
      }
    }
    CHECK(euclidean_distance(out, old_v) <=
          beta * euclidean_distance(new_v, old_v) + 2 * beta * norm(new_v) + 1e-12);
    CHECK(momentum_blend(old_v, old_v, beta) == old_v);
  }
  CHECK(positive_pairs > 500);
}

TEST_CASE("base update with no or one matched feature") {
  const MemoryBank bank = init_bank(3, 4, 1, 0.5);
  CHECK(update_base_class(bank, 2, FeatureSet{}, 0) == bank);
  const MemoryBank same = update_base_class(bank, 2, FeatureSet{bank.base_prototypes[1]}, 0);
  CHECK(same == bank);

  FeatureVector f = bank.base_prototypes[1];
  f[0] += 1.0;
  const MemoryBank moved = update_base_class(bank, 2, FeatureSet{f}, 0);
  CHECK(moved.base_prototypes[1] == momentum_blend(bank.base_prototypes[1], f, 0.5));
  CHECK(moved.base_aux_plus == bank.base_aux_plus);
  CHECK(moved.base_disparity == bank.base_disparity);

  CHECK(thrown_code([&] { update_base_class(bank, 0, FeatureSet{f}, 0); }) ==
        Errc::ClassIndexOutOfRange);
  CHECK(thrown_code([&] { update_base_class(bank, 4, FeatureSet{f}, 0); }) ==
        Errc::ClassIndexOutOfRange);
  CHECK(thrown_code([&] { update_base_class(bank, 1, FeatureSet{{1, 2}, {3, 4}}, 0); }) ==
        Errc::DimensionMismatch);
}

TEST_CASE("base update against the brute-force partition of the concatenated points") {
  Rng rng(5);
  for (int inst = 0; inst < 20; ++inst) {
    MemoryBank bank = init_bank(2, 2, 7, 0.5);
    FeatureSet matched;
    // Blob A holds a tight group around the prototype and a second one 4 units
    // away; blob B is far off. The minimum-inertia 3-partition is unambiguous.
    for (int i = 0; i < 2; ++i) matched.push_back({0.05 * rng.normal(), 0.05 * rng.normal()});
    for (int i = 0; i < 2; ++i) matched.push_back({4 + 0.05 * rng.normal(), 0.05 * rng.normal()});
    for (int i = 0; i < 4; ++i) matched.push_back({25 + 0.05 * rng.normal(), 0.05 * rng.normal()});
    bank.base_prototypes[0] = {0.3, 0.1};

    FeatureSet all = matched;
    all.push_back(bank.base_prototypes[0]);
    const auto part = oracle::best_partition(all, 3);
    const std::size_t proto_cluster = part.back();
    FeatureSet own;
    std::vector<FeatureSet> others(3);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (part[i] == proto_cluster) own.push_back(all[i]);
      else others[part[i]].push_back(all[i]);
    }
    FeatureSet other_means;
    for (const auto& o : others)
      if (!o.empty()) other_means.push_back(mean_vector(o));
    REQUIRE(other_means.size() == 2);

    const MemoryBank out = update_base_class(bank, 1, matched, rng.below(1000));
    const auto expected_proto = momentum_blend(bank.base_prototypes[0], mean_vector(own), 0.5);
    CHECK(close(out.base_prototypes[0], expected_proto, 1e-12));
    const bool direct = close(out.base_aux_plus[0], other_means[0], 1e-12) &&
                        close(out.base_aux_minus[0], other_means[1], 1e-12);
    const bool swapped = close(out.base_aux_plus[0], other_means[1], 1e-12) &&
                         close(out.base_aux_minus[0], other_means[0], 1e-12);
    CHECK((direct || swapped));
    CHECK(cosine_similarity(out.base_aux_plus[0], out.base_prototypes[0]) >=
          cosine_similarity(out.base_aux_minus[0], out.base_prototypes[0]));
    CHECK(close(out.base_disparity[0],
                momentum_blend(bank.base_disparity[0], std_vector(matched), 0.5), 1e-12));
    // Other classes and the novel entries are untouched.
    CHECK(out.base_prototypes[1] == bank.base_prototypes[1]);
    CHECK(out.novel_prototype == bank.novel_prototype);
  }
}

TEST_CASE("base update is deterministic") {
  Rng rng(8);
  const MemoryBank bank = init_bank(4, 6, 3, 0.1);
  FeatureSet matched;
  for (int i = 0; i < 12; ++i) matched.push_back(random_vec(rng, 6));
  CHECK(update_base_class(bank, 3, matched, 77) == update_base_class(bank, 3, matched, 77));
}

TEST_CASE("swapping auxiliaries leaves the assignment score unchanged") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto v = random_vec(rng, 5), a = random_vec(rng, 5), b = random_vec(rng, 5);
    CHECK(auxiliary_score(v, a, b) == auxiliary_score(v, b, a));
  }
}

TEST_CASE("novel refresh from base") {
  MemoryBank bank = init_bank(2, 2, 0, 0.5);
  bank.base_prototypes = {{2, 0}, {0, 2}};
  bank.novel_prototype = {1, 1};
  bank.base_disparity = {{0.3, 0.1}, {0.1, 0.3}};
  bank.novel_disparity = {0.2, 0.2};
  recompute_novel_aux(bank);
  const MemoryBank fixed = refresh_novel_from_base(bank);
  CHECK(fixed.novel_prototype == bank.novel_prototype);
  CHECK(fixed.novel_disparity == bank.novel_disparity);
  check_novel_aux(fixed);

  bank.base_prototypes = {{1, 0}, {0, 1}};
  bank.novel_prototype = {1, 0};
  bank.base_disparity = {{1e-3, 1e-3}, {1e-3, 1e-3}};
  bank.novel_disparity = {1e-3, 1e-3};
  recompute_novel_aux(bank);
  const MemoryBank out = refresh_novel_from_base(bank);
  CHECK(out.novel_prototype[0] == doctest::Approx(0.82322330470336313).epsilon(1e-12));
  CHECK(out.novel_prototype[1] == doctest::Approx(0.17677669529663687).epsilon(1e-12));
  check_novel_aux(out);

  MemoryBank degenerate = bank;
  degenerate.base_prototypes = {{1, 0}, {-1, 0}};
  CHECK(thrown_code([&] { refresh_novel_from_base(degenerate); }) == Errc::ZeroNorm);
}

TEST_CASE("snapshot round trip and errors") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    MemoryBank bank = init_bank(3 + i % 3, 8, rng.below(1u << 20), 0.01);
    bank.base_prototypes[0][0] = 1.0 / 3.0;
    bank.base_prototypes[0][1] = -0.0;
    bank.base_prototypes[0][2] = 5e-324;
    CHECK(load_snapshot(snapshot(bank)) == bank);
  }
  const std::string doc = snapshot(init_bank(2, 3, 1));
  CHECK(thrown_code([&] { load_snapshot(doc.substr(0, doc.size() / 2)); }) ==
        Errc::MalformedSnapshot);
  std::string v0 = doc;
  v0.replace(v0.find("\"v1\""), 4, "\"v0\"");
  CHECK(thrown_code([&] { load_snapshot(v0); }) == Errc::VersionMismatch);
  CHECK(thrown_code([] { load_snapshot("{\"version\": \"v1\"}"); }) == Errc::MalformedSnapshot);
}
