#include "texshuffle/evaluation.hpp"

#include <numeric>
#include <stdexcept>

namespace texshuffle {

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> predictions,
                                 std::span<const ClassLabel> truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("confusion_matrix: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(truths.size()) +
                                " truths");
  }
  ConfusionMatrix counts{};
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++counts[label_index(truths[i])][label_index(predictions[i])];
  }
  return counts;
}

std::int64_t total_count(const ConfusionMatrix& confusion) noexcept {
  std::int64_t total = 0;
  for (const auto& row : confusion) {
    total = std::accumulate(row.begin(), row.end(), total);
  }
  return total;
}

double overall_accuracy(const ConfusionMatrix& confusion) {
  const std::int64_t total = total_count(confusion);
  if (total <= 0) {
    throw std::invalid_argument("overall_accuracy: empty confusion matrix");
  }
  std::int64_t trace = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) trace += confusion[c][c];
  return static_cast<double>(trace) / static_cast<double>(total);
}

PerClassAccuracy per_class_accuracy(const ConfusionMatrix& confusion) {
  PerClassAccuracy result{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& row = confusion[c];
    const std::int64_t support = std::accumulate(row.begin(), row.end(), std::int64_t{0});
    if (support > 0) {
      result[c] = static_cast<double>(row[c]) / static_cast<double>(support);
    }
  }
  return result;
}

PerClassAccuracy per_class_precision(const ConfusionMatrix& confusion) {
  PerClassAccuracy result{};
  for (std::size_t p = 0; p < kNumClasses; ++p) {
    std::int64_t predicted = 0;
    for (std::size_t t = 0; t < kNumClasses; ++t) predicted += confusion[t][p];
    if (predicted > 0) {
      result[p] = static_cast<double>(confusion[p][p]) / static_cast<double>(predicted);
    }
  }
  return result;
}

PerClassAccuracy per_class_f1(const ConfusionMatrix& confusion) {
  const auto recall = per_class_accuracy(confusion);
  const auto precision = per_class_precision(confusion);
  PerClassAccuracy result{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (recall[c] && precision[c] && (*recall[c] + *precision[c]) > 0.0) {
      result[c] = 2.0 * *recall[c] * *precision[c] / (*recall[c] + *precision[c]);
    }
  }
  return result;
}

std::vector<ClassLabel> absent_classes(const ConfusionMatrix& confusion) {
  std::vector<ClassLabel> absent;
  const auto recall = per_class_accuracy(confusion);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (!recall[c]) absent.push_back(label_from_index(c));
  }
  return absent;
}

EpochMetrics metrics_from_confusion(int epoch, double train_loss,
                                    const ConfusionMatrix& confusion) {
  EpochMetrics m;
  m.epoch = epoch;
  m.train_loss = train_loss;
  m.confusion = confusion;
  m.test_overall_accuracy = overall_accuracy(confusion);
  m.per_class_accuracy = per_class_accuracy(confusion);
  return m;
}

const EpochMetrics& best_iteration(const RunReport& report) {
  if (report.epochs.empty()) {
    throw std::invalid_argument("best_iteration: report has no epochs");
  }
  const EpochMetrics* best = &report.epochs.front();
  for (const auto& m : report.epochs) {
    if (m.test_overall_accuracy > best->test_overall_accuracy) best = &m;
  }
  return *best;
}

double average_accuracy(const RunReport& report) {
  if (report.epochs.empty()) {
    throw std::invalid_argument("average_accuracy: report has no epochs");
  }
  double sum = 0.0;
  for (const auto& m : report.epochs) sum += m.test_overall_accuracy;
  return sum / static_cast<double>(report.epochs.size());
}

ComparisonReport compare_runs(const RunReport& control, const RunReport& experimental) {
  const EpochMetrics& best_exp = best_iteration(experimental);
  const EpochMetrics& best_ctl = best_iteration(control);

  ComparisonReport report;
  report.control = control;
  report.experimental = experimental;
  report.experimental_best_epoch = best_exp.epoch;
  report.control_best_epoch = best_ctl.epoch;

  report.best_iteration_rows.push_back(
      {"Overall Accuracy (%)", best_exp.test_overall_accuracy, best_ctl.test_overall_accuracy});
  for (const ClassLabel label : kAllLabels) {
    std::string name(label_name(label));
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    const std::size_t c = label_index(label);
    report.best_iteration_rows.push_back({"\"" + name + "\" Class Accuracy (%)",
                                          best_exp.per_class_accuracy[c],
                                          best_ctl.per_class_accuracy[c]});
  }
  report.average_row = {"Average Accuracy (%)", average_accuracy(experimental),
                        average_accuracy(control)};
  return report;
}

}  // namespace texshuffle
