#pragma once

// Splitting, metrics and the text reports produced by the command line tool.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmaca/bio_encode.hpp"
#include "hmaca/maca_tree.hpp"

namespace hmaca {

struct Metrics {
  std::size_t class_count = 0;
  /// confusion[truth][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  /// Binary tasks only: recall of class 1 and of class 0.
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<std::size_t> support;
};

Metrics compute_metrics(std::size_t class_count, std::span<const ClassLabel> truth,
                        std::span<const ClassLabel> predicted);

/// Runs predict over every window.
Metrics evaluate(const TrainedTree& tree, const std::vector<LabeledWindow>& test);

struct SplitResult {
  std::vector<LabeledWindow> train;
  std::vector<LabeledWindow> test;
};

/// Stratified seeded split. Each class contributes round(count * fraction)
/// items to the training side; both sides keep input order.
SplitResult split(const std::vector<LabeledWindow>& windows, std::size_t class_count,
                  double train_fraction, std::uint64_t seed);

struct AccuracyRow {
  std::string method;
  std::optional<double> coding;
  std::optional<double> promoter;
  std::optional<double> structure;
};

/// Accuracy rows for the comparison methods and HMACA as published.
std::vector<AccuracyRow> published_accuracy_rows();

/// Integer percentage, rounded half up, with a '%' suffix.
std::string format_percent(double fraction);

/// Header plus one line per row; absent cells print "-".
std::string render_accuracy_table(const std::vector<AccuracyRow>& rows);

struct PredictionRecord {
  std::string sequence_id;
  /// 1-based.
  std::size_t position = 1;
  char residue = 'A';
  std::vector<std::pair<std::string, double>> method_scores;
  /// Class symbol, or "-" when no confident call was made.
  std::string predicted = "-";

  std::string sequence_label() const;
};

std::string render_prediction_tsv(const std::vector<PredictionRecord>& records);

/// Flat key<TAB>value dump; `symbols` names each class.
std::string render_metrics(const Metrics& metrics, const std::vector<std::string>& symbols);

}  // namespace hmaca
