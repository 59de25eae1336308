#include "hmaca/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hmaca/format.hpp"
#include "hmaca/random.hpp"

namespace hmaca {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void append_cell(std::string& out, const std::optional<double>& v) {
  out += '\t';
  out += v ? format_percent(*v) : "-";
}

}  // namespace

Metrics compute_metrics(std::size_t class_count, std::span<const ClassLabel> truth,
                        std::span<const ClassLabel> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(Errc::WidthMismatch, "truth and prediction lists differ in length");
  }
  if (truth.empty()) throw Error(Errc::EmptyTestSet, "no test items");
  Metrics m;
  m.class_count = class_count;
  m.confusion.assign(class_count, std::vector<std::size_t>(class_count, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= class_count || predicted[i] >= class_count) {
      throw Error(Errc::InvalidConfig, "label outside class count");
    }
    ++m.confusion[truth[i]][predicted[i]];
  }
  m.total = truth.size();
  m.support.assign(class_count, 0);
  std::vector<std::size_t> predicted_count(class_count, 0);
  for (std::size_t t = 0; t < class_count; ++t) {
    for (std::size_t p = 0; p < class_count; ++p) {
      m.support[t] += m.confusion[t][p];
      predicted_count[p] += m.confusion[t][p];
    }
    m.correct += m.confusion[t][t];
  }
  m.accuracy = ratio(m.correct, m.total);
  for (std::size_t c = 0; c < class_count; ++c) {
    m.precision.push_back(ratio(m.confusion[c][c], predicted_count[c]));
    m.recall.push_back(ratio(m.confusion[c][c], m.support[c]));
  }
  if (class_count == 2) {
    m.sensitivity = m.recall[1];
    m.specificity = m.recall[0];
  }
  return m;
}

Metrics evaluate(const TrainedTree& tree, const std::vector<LabeledWindow>& test) {
  if (test.empty()) throw Error(Errc::EmptyTestSet, "no test windows");
  std::vector<ClassLabel> truth;
  std::vector<ClassLabel> predicted;
  truth.reserve(test.size());
  predicted.reserve(test.size());
  for (const auto& w : test) {
    truth.push_back(w.label);
    predicted.push_back(predict(tree, w.bits).label);
  }
  return compute_metrics(tree.class_count(), truth, predicted);
}

SplitResult split(const std::vector<LabeledWindow>& windows, std::size_t class_count,
                  double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(Errc::InvalidConfig, "train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::vector<std::size_t>> by_class(class_count);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].label >= class_count) throw Error(Errc::InvalidConfig, "label outside class count");
    by_class[windows[i].label].push_back(i);
  }
  std::vector<bool> to_train(windows.size(), false);
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& items = by_class[c];
    if (items.empty()) {
      throw Error(Errc::ClassWithZeroItems, "class " + std::to_string(c) + " has no items");
    }
    Rng rng = make_stream(seed, 3, c);
    shuffle(items, rng);
    const auto take = static_cast<std::size_t>(
        std::floor(static_cast<double>(items.size()) * train_fraction + 0.5));
    for (std::size_t j = 0; j < std::min(take, items.size()); ++j) to_train[items[j]] = true;
  }
  SplitResult out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    (to_train[i] ? out.train : out.test).push_back(windows[i]);
  }
  return out;
}

std::vector<AccuracyRow> published_accuracy_rows() {
  return {
      {"DSP", 0.62, 0.70, 0.66},
      {"PHD", 0.70, 0.68, 0.74},
      {"SAM-T99", 0.68, 0.77, 0.77},
      {"SS Pro", 0.70, 0.73, 0.81},
      {"HMACA", 0.75, 0.85, 0.97},
  };
}

std::string format_percent(double fraction) {
  // The epsilon absorbs binary representation error in values such as 0.85.
  const double pct = std::floor(fraction * 100.0 + 0.5 + 1e-9);
  return std::to_string(static_cast<long long>(pct)) + "%";
}

std::string render_accuracy_table(const std::vector<AccuracyRow>& rows) {
  std::string out = "Prediction Method\tProtein\tPromoter\tStructure\n";
  for (const auto& r : rows) {
    out += r.method;
    append_cell(out, r.coding);
    append_cell(out, r.promoter);
    append_cell(out, r.structure);
    out += '\n';
  }
  return out;
}

std::string PredictionRecord::sequence_label() const {
  return sequence_id + "-" + std::to_string(position) + "-" + std::string(1, residue);
}

std::string render_prediction_tsv(const std::vector<PredictionRecord>& records) {
  std::string out = "Seq-Pos-Residue";
  if (!records.empty()) {
    for (const auto& [name, score] : records.front().method_scores) out += "\t" + name;
  }
  out += "\tPredicted\n";
  for (const auto& r : records) {
    const auto& head = records.front().method_scores;
    const bool same = r.method_scores.size() == head.size() &&
                      std::equal(r.method_scores.begin(), r.method_scores.end(), head.begin(),
                                 [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!same) {
      throw Error(Errc::InconsistentMethodColumns,
                  "record " + r.sequence_label() + " has a different method column list");
    }
    out += r.sequence_label();
    for (const auto& [name, score] : r.method_scores) out += "\t" + format_fixed(score, 3);
    out += "\t" + r.predicted + "\n";
  }
  return out;
}

std::string render_metrics(const Metrics& m, const std::vector<std::string>& symbols) {
  auto name = [&](std::size_t c) { return c < symbols.size() ? symbols[c] : std::to_string(c); };
  std::ostringstream out;
  out << "total\t" << m.total << '\n';
  out << "correct\t" << m.correct << '\n';
  out << "accuracy\t" << format_fixed(m.accuracy, 6) << '\n';
  if (m.sensitivity) out << "sensitivity\t" << format_fixed(*m.sensitivity, 6) << '\n';
  if (m.specificity) out << "specificity\t" << format_fixed(*m.specificity, 6) << '\n';
  for (std::size_t c = 0; c < m.class_count; ++c) {
    out << "support_" << name(c) << '\t' << m.support[c] << '\n';
    out << "precision_" << name(c) << '\t' << format_fixed(m.precision[c], 6) << '\n';
    out << "recall_" << name(c) << '\t' << format_fixed(m.recall[c], 6) << '\n';
  }
  for (std::size_t t = 0; t < m.class_count; ++t) {
    for (std::size_t p = 0; p < m.class_count; ++p) {
      out << "confusion_" << name(t) << '_' << name(p) << '\t' << m.confusion[t][p] << '\n';
    }
  }
  return out.str();
}

}  // namespace hmaca
