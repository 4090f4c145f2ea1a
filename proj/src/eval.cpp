#include "ckm/eval.hpp"

#include <string>

#include "ckm/error.hpp"

namespace ckm {
namespace {

void check_lengths(std::span<const int> preds, std::span<const int> truths) {
  if (preds.size() != truths.size()) {
    fail(Errc::LengthMismatch, std::to_string(preds.size()) + " predictions, " +
                                   std::to_string(truths.size()) + " truths");
  }
}

bool is_base(int label, std::size_t C) { return label >= 1 && label <= static_cast<int>(C); }

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

double wi_from_counts(std::size_t closed_hits, std::size_t closed_preds, std::size_t open_hits,
                      std::size_t open_preds) {
  if (closed_preds == 0 || open_preds == 0 || open_hits == 0) {
    fail(Errc::UndefinedMetric, "wilderness impact needs base-class predictions in both subsets");
  }
  const double p_closed = static_cast<double>(closed_hits) / static_cast<double>(closed_preds);
  const double p_open = static_cast<double>(open_hits) / static_cast<double>(open_preds);
  return p_closed / p_open - 1.0;
}

}  // namespace

int collapse_label(int truth, std::size_t num_base_classes) {
  const int novel = static_cast<int>(num_base_classes) + 1;
  return truth >= novel ? novel : truth;
}

ConfusionTable confusion(std::span<const int> preds, std::span<const int> truths,
                         std::size_t num_base_classes) {
  check_lengths(preds, truths);
  const std::size_t C = num_base_classes;
  ConfusionTable t;
  t.num_base_classes = C;
  t.counts.assign(C + 2, std::vector<std::size_t>(C + 1, 0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 1 || preds[i] > static_cast<int>(C) + 1) {
      fail(Errc::LabelOutOfRange, "prediction " + std::to_string(preds[i]));
    }
    if (truths[i] < 0) fail(Errc::LabelOutOfRange, "truth " + std::to_string(truths[i]));
    const int row = collapse_label(truths[i], C);
    ++t.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(preds[i] - 1)];
  }
  return t;
}

double wilderness_impact(std::span<const int> preds, std::span<const int> truths,
                         std::size_t num_base_classes) {
  check_lengths(preds, truths);
  std::size_t closed_hits = 0, closed_preds = 0, open_hits = 0, open_preds = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!is_base(preds[i], num_base_classes)) continue;
    const bool hit = preds[i] == truths[i];
    ++open_preds;
    open_hits += hit ? 1 : 0;
    if (is_base(truths[i], num_base_classes)) {
      ++closed_preds;
      closed_hits += hit ? 1 : 0;
    }
  }
  return wi_from_counts(closed_hits, closed_preds, open_hits, open_preds);
}

double wilderness_impact(const ConfusionTable& table) {
  const int C = static_cast<int>(table.num_base_classes);
  std::size_t closed_hits = 0, closed_preds = 0, open_preds = 0;
  for (int p = 1; p <= C; ++p) {
    for (int t = 0; t <= C + 1; ++t) {
      const std::size_t n = table.at(t, p);
      open_preds += n;
      if (t >= 1 && t <= C) closed_preds += n;
      if (t == p) closed_hits += n;
    }
  }
  // Base hits can only come from base-truth rows, so both hit counts agree.
  return wi_from_counts(closed_hits, closed_preds, closed_hits, open_preds);
}

std::size_t aose(std::span<const int> preds, std::span<const int> truths,
                 std::size_t num_base_classes) {
  check_lengths(preds, truths);
  const int novel = static_cast<int>(num_base_classes) + 1;
  std::size_t n = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (collapse_label(truths[i], num_base_classes) == novel && is_base(preds[i], num_base_classes)) {
      ++n;
    }
  }
  return n;
}

std::size_t aose(const ConfusionTable& table) {
  const int C = static_cast<int>(table.num_base_classes);
  std::size_t n = 0;
  for (int p = 1; p <= C; ++p) n += table.at(C + 1, p);
  return n;
}

std::optional<double> novel_recall(std::span<const int> preds, std::span<const int> truths,
                                   std::size_t num_base_classes) {
  check_lengths(preds, truths);
  const int novel = static_cast<int>(num_base_classes) + 1;
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (collapse_label(truths[i], num_base_classes) != novel) continue;
    ++total;
    hits += preds[i] == novel ? 1 : 0;
  }
  return ratio(hits, total);
}

std::optional<double> novel_recall(const ConfusionTable& table) {
  const int novel = static_cast<int>(table.num_base_classes) + 1;
  std::size_t total = 0;
  for (int p = 1; p <= novel; ++p) total += table.at(novel, p);
  return ratio(table.at(novel, novel), total);
}

std::optional<double> base_accuracy(std::span<const int> preds, std::span<const int> truths,
                                    std::size_t num_base_classes) {
  check_lengths(preds, truths);
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!is_base(truths[i], num_base_classes)) continue;
    ++total;
    hits += preds[i] == truths[i] ? 1 : 0;
  }
  return ratio(hits, total);
}

std::optional<double> base_accuracy(const ConfusionTable& table) {
  const int C = static_cast<int>(table.num_base_classes);
  std::size_t hits = 0, total = 0;
  for (int t = 1; t <= C; ++t) {
    for (int p = 1; p <= C + 1; ++p) total += table.at(t, p);
    hits += table.at(t, t);
  }
  return ratio(hits, total);
}

SelectionQuality selection_metrics(std::span<const std::size_t> selected_indices,
                                   std::span<const int> pool_truths, std::size_t num_base_classes) {
  const int first_novel_id = static_cast<int>(num_base_classes) + 2;
  SelectionQuality q;
  for (int t : pool_truths) q.novel_in_pool += t >= first_novel_id ? 1 : 0;
  for (std::size_t i : selected_indices) {
    if (i >= pool_truths.size()) {
      fail(Errc::IndexOutOfRange, "selected index " + std::to_string(i));
    }
    q.true_positives += pool_truths[i] >= first_novel_id ? 1 : 0;
  }
  q.selected = selected_indices.size();
  q.precision = ratio(q.true_positives, q.selected);
  q.recall = ratio(q.true_positives, q.novel_in_pool);
  return q;
}

MetricReport evaluate_predictions(std::span<const int> preds, std::span<const int> truths,
                                  std::size_t num_base_classes) {
  const ConfusionTable table = confusion(preds, truths, num_base_classes);
  const int C = static_cast<int>(num_base_classes);

  MetricReport r;
  for (int k = 1; k <= C + 1; ++k) {
    std::size_t col = 0, row = 0;
    for (int t = 0; t <= C + 1; ++t) col += table.at(t, k);
    for (int p = 1; p <= C + 1; ++p) row += table.at(k, p);
    if (auto v = ratio(table.at(k, k), col)) r.per_class_precision[k] = *v;
    if (auto v = ratio(table.at(k, k), row)) r.per_class_recall[k] = *v;
  }
  r.base_accuracy = base_accuracy(table);
  r.novel_recall = novel_recall(table);
  try {
    r.wilderness_impact = wilderness_impact(table);
  } catch (const Error& e) {
    if (e.code() != Errc::UndefinedMetric) throw;
  }
  r.aose = aose(table);
  return r;
}

}  // namespace ckm
