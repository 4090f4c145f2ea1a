#include "ckm/experiment.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ckm/afa.hpp"
#include "ckm/bnsm.hpp"
#include "ckm/clustering.hpp"
#include "ckm/error.hpp"
#include "ckm/random.hpp"

namespace ckm {
namespace {

using nlohmann::json;

constexpr const char* kCsvHeader =
    "iter,base_accuracy,novel_recall,wilderness_impact,aose,selection_precision,"
    "selection_recall,loss_nc,loss_ac";

// Running sums between two report rows.
struct Tally {
  std::size_t selected = 0;
  std::size_t hits = 0;
  std::size_t novel_in_pool = 0;
  std::size_t pool_size = 0;
  double loss_nc = 0.0;
  std::size_t nc_steps = 0;
  double loss_ac = 0.0;
  std::size_t ac_steps = 0;

  void apply_to(MetricRow& row) const {
    if (selected > 0) row.metrics.selection_precision = static_cast<double>(hits) / selected;
    if (novel_in_pool > 0) {
      row.metrics.selection_recall = static_cast<double>(hits) / novel_in_pool;
    }
    if (nc_steps > 0) row.loss_nc = loss_nc / static_cast<double>(nc_steps);
    if (ac_steps > 0) row.loss_ac = loss_ac / static_cast<double>(ac_steps);
  }
};

template <typename Fn>
auto in_stage(std::size_t iter, const char* stage_name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "iteration " + std::to_string(iter) + ", stage " + stage_name + ": " +
                              e.what());
  }
}

FeatureSet gather(const FeatureSet& features, const std::vector<std::size_t>& idx) {
  FeatureSet out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(features[i]);
  return out;
}

MemoryBank source_memory_update(const MemoryBank& bank, const LabeledBatch& batch,
                                std::uint64_t master, std::size_t iter) {
  MemoryBank out = bank;
  for (std::size_t c = 1; c <= bank.num_base_classes; ++c) {
    FeatureSet matched;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch.true_labels[i] == static_cast<int>(c)) matched.push_back(batch.features[i]);
    }
    out = update_base_class(out, c, matched, kmeans_seed(master, iter, c));
  }
  return refresh_novel_from_base(out);
}

MetricReport evaluate(const MemoryBank& bank, const ProbeClassifier& probe,
                      const LabeledBatch& held_out, double fg_threshold,
                      std::optional<double>* probe_base_accuracy) {
  const QueryView view = algorithm_view(held_out);
  const ForegroundSelection kept = filter_foreground(view.features, view.fg_scores, fg_threshold);
  const std::size_t C = bank.num_base_classes;
  if (kept.features.empty()) {
    return evaluate_predictions({}, {}, C);
  }

  std::vector<int> truths;
  for (std::size_t i : kept.indices) truths.push_back(held_out.true_labels[i]);

  std::vector<int> probe_preds;
  for (const auto& f : kept.features) probe_preds.push_back(static_cast<int>(predict(probe, f)) + 1);

  const TcmResult tcm = build_tcm(kept.features, bank);
  std::vector<int> afa_preds(tcm.assigned_labels.begin(), tcm.assigned_labels.end());

  MetricReport report = evaluate_predictions(probe_preds, truths, C);
  if (probe_base_accuracy) *probe_base_accuracy = report.base_accuracy;
  report.base_accuracy = base_accuracy(afa_preds, truths, C);
  return report;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

void write_row(std::ostringstream& out, const std::string& iter, const MetricRow& row) {
  const auto& m = row.metrics;
  out << iter << ',' << fmt_opt(m.base_accuracy) << ',' << fmt_opt(m.novel_recall) << ','
      << fmt_opt(m.wilderness_impact) << ',' << m.aose << ',' << fmt_opt(m.selection_precision)
      << ',' << fmt_opt(m.selection_recall) << ',' << fmt_opt(row.loss_nc) << ','
      << fmt_opt(row.loss_ac) << '\n';
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json row_json(const MetricRow& row) {
  const auto& m = row.metrics;
  json per_precision = json::object();
  json per_recall = json::object();
  for (const auto& [k, v] : m.per_class_precision) per_precision[std::to_string(k)] = v;
  for (const auto& [k, v] : m.per_class_recall) per_recall[std::to_string(k)] = v;
  return {{"iter", row.iter},
          {"base_accuracy", opt_json(m.base_accuracy)},
          {"novel_recall", opt_json(m.novel_recall)},
          {"wilderness_impact", opt_json(m.wilderness_impact)},
          {"aose", m.aose},
          {"selection_precision", opt_json(m.selection_precision)},
          {"selection_recall", opt_json(m.selection_recall)},
          {"loss_nc", opt_json(row.loss_nc)},
          {"loss_ac", opt_json(row.loss_ac)},
          {"per_class_precision", per_precision},
          {"per_class_recall", per_recall}};
}

}  // namespace

std::uint64_t kmeans_seed(std::uint64_t master, std::size_t iteration, std::size_t class_label) {
  return hash64(hash64(master, iteration, stage::kKMeans), class_label, "class");
}

double compute_baseline(const MemoryBank& source_only_bank, const LabeledBatch& batch) {
  const int C = static_cast<int>(source_only_bank.num_base_classes);
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int truth = batch.true_labels[i];
    if (truth < 1 || truth > C) continue;
    ++total;
    const std::size_t nearest = nearest_centroid(batch.features[i], source_only_bank.base_prototypes);
    hits += static_cast<int>(nearest) + 1 == truth ? 1 : 0;
  }
  if (total == 0) fail(Errc::UndefinedMetric, "no base-truth samples for the baseline");
  return static_cast<double>(hits) / static_cast<double>(total);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate_config(config);
  const std::uint64_t master = config.seed;
  const std::size_t C = config.spec.num_base_classes;
  const std::size_t novel_index = C;  // probe output of the unified novel class

  const DomainSpec spec = make_spec(config.spec, hash64(master, 0, stage::kSpec));
  MemoryBank fresh = init_bank(C, config.spec.dim, hash64(master, 0, stage::kBankInit), config.beta);
  MemoryBank bank = options.initial_bank ? *options.initial_bank : fresh;
  validate_bank(bank);
  MemoryBank source_only = fresh;
  ProbeClassifier probe = make_probe(C + 1, config.spec.dim, config.learning_rate,
                                     config.lambda_novel, config.lambda_adaptive);

  const LabeledBatch held_out =
      sample_batch(spec, Domain::Target, config.eval_foreground, config.eval_background,
                   hash64(master, 0, stage::kHeldOut));

  ExperimentReport report;
  Tally since_row;
  Tally whole_run;

  for (std::size_t t = options.start_iteration + 1; t <= config.iterations; ++t) {
    // Source phase: memory bank from matched features.
    const LabeledBatch source = in_stage(t, "source-sample", [&] {
      return sample_batch(spec, Domain::Source,
                          BatchSizes{config.source_foreground, config.source_background,
                                     config.source_novel},
                          hash64(master, t, stage::kSourceBatch));
    });
    bank = in_stage(t, "memory-bank", [&] { return source_memory_update(bank, source, master, t); });
    source_only =
        in_stage(t, "baseline-bank", [&] { return source_memory_update(source_only, source, master, t); });

    // Novel selection from the unmatched pool.
    in_stage(t, "novel-selection", [&] {
      std::vector<std::size_t> pool_idx;
      for (std::size_t i = 0; i < source.size(); ++i) {
        if (source.true_labels[i] == 0) pool_idx.push_back(i);
      }
      if (pool_idx.size() < config.top_k) return 0;
      const FeatureSet pool = gather(source.features, pool_idx);
      std::vector<int> pool_truths;
      for (std::size_t i : pool_idx) pool_truths.push_back(source.origin_labels[i]);

      const ScmResult scm = build_scm(pool, bank, config.gamma);
      const NovelSelection picked = select_topk(scm, pool, config.top_k);
      const SelectionQuality q = selection_metrics(picked.indices, pool_truths, C);
      for (Tally* tally : {&since_row, &whole_run}) {
        tally->selected += q.selected;
        tally->hits += q.true_positives;
        tally->novel_in_pool += q.novel_in_pool;
        tally->pool_size += pool.size();
      }

      const std::vector<std::size_t> labels(picked.features.size(), novel_index);
      const double loss = mean_cross_entropy(probe, picked.features, labels);
      for (Tally* tally : {&since_row, &whole_run}) {
        tally->loss_nc += loss;
        ++tally->nc_steps;
      }
      probe = sgd_step(probe, picked.features, labels, config.lambda_novel);
      bank = update_novel_memory(bank, picked);
      return 0;
    });

    // Target phase: assignment and asynchronous prototype refresh.
    in_stage(t, "target-assignment", [&] {
      const LabeledBatch target =
          sample_batch(spec, Domain::Target, config.target_foreground, config.target_background,
                       hash64(master, t, stage::kTargetBatch));
      const QueryView view = algorithm_view(target);
      const ForegroundSelection kept = filter_foreground(view.features, view.fg_scores,
                                                         config.fg_threshold);
      if (kept.features.empty()) return 0;
      const TcmResult tcm = build_tcm(kept.features, bank);

      std::vector<std::size_t> outputs;
      for (std::size_t label : tcm.assigned_labels) outputs.push_back(label - 1);
      const double loss = mean_cross_entropy(probe, kept.features, outputs);
      for (Tally* tally : {&since_row, &whole_run}) {
        tally->loss_ac += loss;
        ++tally->ac_steps;
      }
      probe = sgd_step(probe, kept.features, outputs, config.lambda_adaptive);
      bank = update_prototypes_from_target(bank, kept.features, tcm.assigned_labels);
      return 0;
    });

    if (t % config.eval_every == 0) {
      MetricRow row;
      row.iter = t;
      row.metrics = in_stage(t, "evaluation", [&] {
        return evaluate(bank, probe, held_out, config.fg_threshold, nullptr);
      });
      since_row.apply_to(row);
      report.rows.push_back(std::move(row));
      since_row = Tally{};
    }
    if (config.snapshot_every > 0 && t % config.snapshot_every == 0 && options.on_snapshot) {
      options.on_snapshot(t, bank);
    }
  }

  report.summary.iter = config.iterations;
  report.summary.metrics = evaluate(bank, probe, held_out, config.fg_threshold,
                                    &report.probe_base_accuracy);
  whole_run.apply_to(report.summary);
  if (whole_run.pool_size > 0) {
    report.selection_chance_rate =
        static_cast<double>(whole_run.novel_in_pool) / static_cast<double>(whole_run.pool_size);
  }
  try {
    report.baseline_accuracy = compute_baseline(source_only, held_out);
  } catch (const Error& e) {
    if (e.code() != Errc::UndefinedMetric) throw;
  }
  report.final_bank = std::move(bank);
  report.source_only_bank = std::move(source_only);
  report.final_probe = std::move(probe);
  return report;
}

std::string metrics_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& row : report.rows) write_row(out, std::to_string(row.iter), row);
  write_row(out, "final", report.summary);
  return out.str();
}

std::string summary_json(const ExperimentConfig& config, const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) rows.push_back(row_json(row));
  json doc = {
      {"config", json::parse(config_to_json(config))},
      {"notes",
       "Probe losses are the novel classification loss (weight lambda_novel) and the adaptive "
       "classification loss (weight lambda_adaptive). Detection and global adaptation losses are "
       "not modelled. base_accuracy is the adaptive feature assignment accuracy on base-truth "
       "held-out target features; the remaining classification metrics use probe predictions."},
      {"final", row_json(report.summary)},
      {"baseline_accuracy", opt_json(report.baseline_accuracy)},
      {"probe_base_accuracy", opt_json(report.probe_base_accuracy)},
      {"selection_chance_rate", opt_json(report.selection_chance_rate)},
      {"rows", rows},
  };
  return doc.dump(2);
}

std::string csv_to_json(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    fail(Errc::MalformedSnapshot, "metrics.csv header does not match");
  }
  std::vector<std::string> keys;
  {
    std::istringstream hs(line);
    std::string k;
    while (std::getline(hs, k, ',')) keys.push_back(k);
  }
  json rows = json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < keys.size()) cells.emplace_back();
    if (cells.size() != keys.size()) fail(Errc::MalformedSnapshot, "metrics.csv row width: " + line);
    json obj;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (cells[i].empty()) {
        obj[keys[i]] = nullptr;
      } else if (keys[i] == "iter" && cells[i] == "final") {
        obj[keys[i]] = "final";
      } else if (keys[i] == "iter" || keys[i] == "aose") {
        obj[keys[i]] = std::stoull(cells[i]);
      } else {
        obj[keys[i]] = std::stod(cells[i]);
      }
    }
    rows.push_back(std::move(obj));
  }
  return json{{"rows", rows}}.dump(2);
}

}  // namespace ckm
