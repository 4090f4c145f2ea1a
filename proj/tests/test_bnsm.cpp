#include <doctest.h>

#include <cmath>

#include "ckm/bnsm.hpp"
#include "ckm/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ckm;

TEST_CASE("farthest partner") {
  CHECK(farthest_partner(FeatureSet{{0, 0}, {1, 0}, {5, 0}}, 0) == 2);
  CHECK(farthest_partner(FeatureSet{{0, 0}, {1, 0}}, 0) == 1);
  CHECK(farthest_partner(FeatureSet{{0, 0}, {3, 0}, {0, 3}}, 0) == 1);
  CHECK(farthest_partner(FeatureSet{{0, 0}, {3, 0}, {0, 3}}, 1) == 2);
  CHECK(thrown_code([] { farthest_partner(FeatureSet{{0, 0}, {1, 0}}, 2); }) ==
        Errc::ClassIndexOutOfRange);
}

TEST_CASE("protoball hand values") {
  const FeatureVector a{0, 0}, b{1, 0};
  CHECK(std::abs(protoball_distance(FeatureVector{0.5, 0.7}, a, b, 0.65)) <= 1e-12);
  CHECK(std::abs(protoball_distance(FeatureVector{0.5, 0.7}, a, b, 0.2)) <= 1e-12);
  const double expected = 0.15 - (std::sqrt(1.25) - 0.65);
  CHECK(std::abs(protoball_distance(FeatureVector{0, 0.5}, a, b, 0.65) - expected) <= 1e-15);
  CHECK(std::abs(protoball_distance(FeatureVector{0, 0.5}, a, b, 0.65) - (-0.3180340)) <= 1e-7);
  CHECK(thrown_code([] {
          protoball_distance(FeatureVector{0, 1}, FeatureVector{1, 1}, FeatureVector{1, 1});
        }) == Errc::DegeneratePair);
}

TEST_CASE("protoball is antisymmetric and scale invariant") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    FeatureVector v(4), a(4), b(4);
    for (auto* x : {&v, &a, &b})
      for (auto& e : *x) e = rng.normal() * 3;
    const double g = rng.uniform(0.1, 1.5);
    const double u = protoball_distance(v, a, b, g);
    CHECK(std::abs(u + protoball_distance(v, b, a, g)) <= 1e-12);
    // |u| <= 1 by the triangle inequality.
    CHECK(std::abs(u) <= 1.0 + 1e-12);
    const double s = 7.5;
    CHECK(std::abs(protoball_distance(scaled(v, s), scaled(a, s), scaled(b, s), g) - u) <= 1e-12);
  }
}

TEST_CASE("scm hand values") {
  MemoryBank bank = init_bank(2, 2, 0, 0.01);
  bank.base_prototypes = {{0, 0}, {1, 0}};
  const ScmResult scm = build_scm(FeatureSet{{0, 0.5}, {0.5, 0.3}}, bank, 0.65);
  CHECK(scm.partner_of == std::vector<std::size_t>{1, 0});
  CHECK(std::abs(scm.scores[0][0] - (-0.3180340)) <= 1e-7);
  CHECK(std::abs(scm.scores[1][0] - 0.3180340) <= 1e-7);
  CHECK(scm.best_scores[0] == scm.scores[0][0]);
  CHECK(std::abs(scm.best_scores[1]) <= 1e-12);
  CHECK(thrown_code([&] { build_scm(FeatureSet{}, bank); }) == Errc::EmptyBatch);
}

TEST_CASE("scm invariants") {
  Rng rng(6);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t C = 2 + rng.below(5);
    MemoryBank bank = init_bank(C, 5, rng.below(1000), 0.01);
    FeatureSet pool(1 + rng.below(30), FeatureVector(5));
    for (auto& p : pool)
      for (auto& x : p) x = rng.normal() * 2;
    const ScmResult scm = build_scm(pool, bank);
    REQUIRE(scm.scores.size() == C);
    for (std::size_t c = 0; c < C; ++c) {
      CHECK(scm.partner_of[c] != c);
      CHECK(scm.partner_of[c] == farthest_partner(bank.base_prototypes, c));
    }
    for (std::size_t n = 0; n < pool.size(); ++n) {
      double m = INFINITY;
      for (std::size_t c = 0; c < C; ++c) m = std::min(m, scm.scores[c][n]);
      CHECK(scm.best_scores[n] == m);
    }
  }
}

TEST_CASE("top-k selection") {
  const FeatureSet pool = {{1, 0}, {2, 0}, {3, 0}};
  ScmResult scm;
  scm.best_scores = {3, 1, 2};
  CHECK(select_topk(scm, pool, 1).indices == std::vector<std::size_t>{1});
  scm.best_scores = {1, 1, 2};
  const NovelSelection sel = select_topk(scm, pool, 2);
  CHECK(sel.indices == std::vector<std::size_t>{0, 1});
  CHECK(sel.features == FeatureSet{{1, 0}, {2, 0}});
  CHECK(thrown_code([&] { select_topk(scm, pool, 4); }) == Errc::KTooLarge);
  CHECK(thrown_code([&] { select_topk(scm, FeatureSet{{1, 0}}, 1); }) == Errc::LengthMismatch);
}

TEST_CASE("top-k matches the full-sort oracle") {
  Rng rng(100);
  for (int inst = 0; inst < 100; ++inst) {
    ScmResult scm;
    FeatureSet pool;
    for (int i = 0; i < 100; ++i) {
      // Coarse values force plenty of ties.
      scm.best_scores.push_back(std::round(rng.normal() * 4) / 4);
      pool.push_back({static_cast<double>(i)});
    }
    const std::size_t k = 1 + rng.below(10);
    const NovelSelection sel = select_topk(scm, pool, k);
    CHECK(sel.indices == oracle::topk_smallest(scm.best_scores, k));
    for (std::size_t i = 0; i < k; ++i) CHECK(sel.features[i] == pool[sel.indices[i]]);
  }
}

TEST_CASE("novel memory update") {
  MemoryBank bank = init_bank(3, 2, 5, 0.5);
  bank.novel_prototype = {1, 0};
  bank.novel_disparity = {0.5, 0.5};
  recompute_novel_aux(bank);

  NovelSelection same{{0, 1}, {{1, 0}, {1, 0}}};
  const MemoryBank fixed = update_novel_memory(bank, same);
  CHECK(fixed.novel_prototype == bank.novel_prototype);

  NovelSelection one{{0}, {{3, 1}}};
  const MemoryBank a = update_novel_memory(bank, one);
  CHECK(a.novel_disparity == bank.novel_disparity);
  CHECK(a.novel_prototype == momentum_blend(bank.novel_prototype, FeatureVector{3, 1}, 0.5));
  CHECK(a.novel_aux_plus == add(a.novel_prototype, a.novel_disparity));

  NovelSelection orth{{0, 1}, {{0, 1}, {0, 3}}};
  CHECK(update_novel_memory(bank, orth).novel_prototype == bank.novel_prototype);

  NovelSelection spread{{0, 1, 2}, {{2, 0}, {4, 2}, {3, 1}}};
  const MemoryBank b = update_novel_memory(bank, spread);
  CHECK(b.novel_prototype == momentum_blend(bank.novel_prototype, FeatureVector{3, 1}, 0.5));
  CHECK(b.novel_disparity ==
        momentum_blend(bank.novel_disparity, std_vector(spread.features), 0.5));
  CHECK(b.novel_aux_minus == subtract(b.novel_prototype, b.novel_disparity));
  // Base entries are never touched.
  CHECK(b.base_prototypes == bank.base_prototypes);

  CHECK(thrown_code([&] { update_novel_memory(bank, NovelSelection{}); }) == Errc::EmptySelection);
}

TEST_CASE("selection ignores batch composition and global scale") {
  Rng rng(909);
  for (int inst = 0; inst < 30; ++inst) {
    MemoryBank bank = init_bank(4, 6, rng.below(1000));
    FeatureSet a(12, FeatureVector(6)), b(5, FeatureVector(6));
    for (auto* s : {&a, &b})
      for (auto& p : *s)
        for (auto& x : p) x = rng.normal() * 2;
    const ScmResult sa = build_scm(a, bank);
    CHECK(sa.partner_of == build_scm(b, bank).partner_of);

    const double s = 0.3 + 3 * rng.uniform();
    MemoryBank big = bank;
    for (auto& m : big.base_prototypes) m = scaled(m, s);
    FeatureSet a_big;
    for (const auto& v : a) a_big.push_back(scaled(v, s));
    CHECK(select_topk(build_scm(a_big, big), a_big, 5).indices == select_topk(sa, a, 5).indices);
  }
}
