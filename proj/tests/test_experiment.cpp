#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "ckm/experiment.hpp"
#include "ckm/random.hpp"
#include "test_util.hpp"

using namespace ckm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.iterations = 30;
  c.eval_every = 7;
  c.eval_foreground = 100;
  c.eval_background = 50;
  return c;
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("row count and csv layout") {
  const ExperimentConfig c = small_config();
  const ExperimentReport r = run_experiment(c);
  CHECK(r.rows.size() == 30 / 7);
  const std::string csv = metrics_csv(r);
  CHECK(line_count(csv) == 1 + 30 / 7 + 1);
  CHECK(csv.rfind("iter,base_accuracy,novel_recall,wilderness_impact,aose,selection_precision,"
                  "selection_recall,loss_nc,loss_ac\n",
                  0) == 0);
  CHECK(csv.find("\nfinal,") != std::string::npos);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].iter == 7 * (i + 1));

  const auto doc = nlohmann::json::parse(csv_to_json(csv));
  CHECK(doc["rows"].size() == r.rows.size() + 1);
  CHECK(doc["rows"].back()["iter"] == "final");
  const auto summary = nlohmann::json::parse(summary_json(c, r));
  CHECK(summary.contains("baseline_accuracy"));
  CHECK(summary["rows"].size() == r.rows.size());
}

TEST_CASE("same seed gives identical output, different seed differs") {
  const ExperimentConfig c = small_config();
  const std::string a = metrics_csv(run_experiment(c));
  CHECK(a == metrics_csv(run_experiment(c)));
  ExperimentConfig d = c;
  d.seed = 43;
  CHECK(a != metrics_csv(run_experiment(d)));
}

TEST_CASE("zero iterations leave the bank at its initial state") {
  ExperimentConfig c = small_config();
  c.iterations = 0;
  const ExperimentReport r = run_experiment(c);
  CHECK(r.rows.empty());
  CHECK(r.final_bank == init_bank(5, 32, hash64(c.seed, 0, stage::kBankInit), c.beta));
  CHECK(!r.summary.metrics.selection_precision);
  CHECK(!r.summary.loss_nc);
}

TEST_CASE("resuming from an intermediate bank reproduces the final bank") {
  ExperimentConfig c = small_config();
  c.iterations = 24;
  c.snapshot_every = 10;
  std::map<std::size_t, std::string> snaps;
  RunOptions opts;
  opts.on_snapshot = [&](std::size_t t, const MemoryBank& b) { snaps[t] = snapshot(b); };
  const ExperimentReport full = run_experiment(c, opts);
  REQUIRE(snaps.size() == 2);

  for (const auto& [t, doc] : snaps) {
    RunOptions resume;
    resume.start_iteration = t;
    resume.initial_bank = load_snapshot(doc);
    const ExperimentReport tail = run_experiment(c, resume);
    CHECK(tail.final_bank == full.final_bank);
  }
}

TEST_CASE("baseline on an oracle bank") {
  SpecParams p;
  p.shift_magnitude = 0.0;
  p.jitter_spread = 0.0;
  const DomainSpec spec = make_spec(p, 42);
  MemoryBank bank = init_bank(5, 32, 0);
  for (std::size_t c = 0; c < 5; ++c) bank.base_prototypes[c] = spec.class_means[c];
  const LabeledBatch eval = sample_batch(spec, Domain::Target, 400, 100, 8);
  CHECK(compute_baseline(bank, eval) > 0.95);

  const LabeledBatch bg_only = sample_batch(spec, Domain::Target, 0, 10, 8);
  CHECK(thrown_code([&] { compute_baseline(bank, bg_only); }) == Errc::UndefinedMetric);
}

TEST_CASE("novel selection beats chance when novel classes neighbour base classes") {
  // With prototypes at the true class means, candidates scored by the
  // prototype-ball metric should be novel objects far more often than a random
  // pick from the unmatched pool.
  SpecParams p;
  p.novel_offset = 8.0;
  const DomainSpec spec = make_spec(p, 42);
  MemoryBank bank = init_bank(5, 32, 0);
  for (std::size_t c = 0; c < 5; ++c) bank.base_prototypes[c] = spec.class_means[c];

  std::size_t hits = 0, picks = 0, novel = 0, pool_total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const LabeledBatch b = sample_batch(spec, Domain::Source, BatchSizes{0, 30, 10}, seed);
    const ScmResult scm = build_scm(b.features, bank);
    const NovelSelection sel = select_topk(scm, b.features, 5);
    const SelectionQuality q = selection_metrics(sel.indices, b.origin_labels, 5);
    hits += q.true_positives;
    picks += q.selected;
    novel += q.novel_in_pool;
    pool_total += b.size();
  }
  const double precision = static_cast<double>(hits) / picks;
  const double chance = static_cast<double>(novel) / pool_total;
  MESSAGE("precision " << precision << " chance " << chance);
  CHECK(precision >= 2 * chance);
}

TEST_CASE("errors name the iteration and stage") {
  ExperimentConfig c = small_config();
  c.iterations = 3;
  RunOptions opts;
  MemoryBank bad = init_bank(5, 32, 0);
  bad.base_prototypes[0] = FeatureVector(32, 0.0);
  bad.base_prototypes[1] = FeatureVector(32, 0.0);
  bad.base_prototypes[2] = FeatureVector(32, 0.0);
  bad.base_prototypes[3] = FeatureVector(32, 0.0);
  bad.base_prototypes[4] = FeatureVector(32, 0.0);
  opts.initial_bank = bad;
  try {
    run_experiment(c, opts);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("iteration 1") != std::string::npos);
    CHECK(msg.find("stage") != std::string::npos);
  }
}
