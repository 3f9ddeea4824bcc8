#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "texshuffle/report.hpp"

namespace texshuffle {

/// counts[t][p] = samples with truth t predicted as p.
ConfusionMatrix confusion_matrix(std::span<const ClassLabel> predictions,
                                 std::span<const ClassLabel> truths);

std::int64_t total_count(const ConfusionMatrix& confusion) noexcept;

/// trace / sum. Throws std::invalid_argument on an all-zero matrix.
double overall_accuracy(const ConfusionMatrix& confusion);

/// Diagonal over row sum, nullopt for classes with no true samples.
PerClassAccuracy per_class_accuracy(const ConfusionMatrix& confusion);

/// Diagonal over column sum, nullopt for classes never predicted.
PerClassAccuracy per_class_precision(const ConfusionMatrix& confusion);

/// Harmonic mean of recall and precision; nullopt when either is undefined
/// or both are zero.
PerClassAccuracy per_class_f1(const ConfusionMatrix& confusion);

/// Classes with no true samples in the matrix.
std::vector<ClassLabel> absent_classes(const ConfusionMatrix& confusion);

/// Fills overall and per-class accuracy from the confusion counts.
EpochMetrics metrics_from_confusion(int epoch, double train_loss,
                                    const ConfusionMatrix& confusion);

/// Highest test accuracy, earliest epoch on ties.
const EpochMetrics& best_iteration(const RunReport& report);

/// Mean test accuracy over all epochs of one run.
double average_accuracy(const RunReport& report);

struct ComparisonRow {
  std::string metric;
  std::optional<double> experimental;
  std::optional<double> control;
};

/// Best-iteration rows and the average row, experimental column first.
struct ComparisonReport {
  RunReport control;
  RunReport experimental;
  int experimental_best_epoch = 0;
  int control_best_epoch = 0;
  std::vector<ComparisonRow> best_iteration_rows;
  ComparisonRow average_row;
};

ComparisonReport compare_runs(const RunReport& control, const RunReport& experimental);

/// Aligned plain-text table, percentages with two decimals.
std::string render_table(const ComparisonReport& report);
std::string render_csv(const ComparisonReport& report);
nlohmann::json comparison_to_json(const ComparisonReport& report);

/// Per-epoch test accuracy curves for both arms as a standalone SVG.
std::string render_accuracy_svg(const ComparisonReport& report);

}  // namespace texshuffle
