#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "texshuffle/config.hpp"
#include "texshuffle/dataset.hpp"

namespace texshuffle {

/// counts[truth][prediction].
using ConfusionMatrix = std::array<std::array<std::int64_t, kNumClasses>, kNumClasses>;

/// Per-true-class recall; nullopt when the class has no test samples.
using PerClassAccuracy = std::array<std::optional<double>, kNumClasses>;

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_overall_accuracy = 0.0;
  PerClassAccuracy per_class_accuracy{};
  ConfusionMatrix confusion{};
};

struct RunReport {
  std::string arm;  // "control" or "experimental"
  TrainConfig config;
  std::vector<EpochMetrics> epochs;
  double wall_time_seconds = 0.0;
  std::string weights_checksum;

  std::string train_split_checksum;
  std::string test_split_checksum;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::string pretrained_source;
  std::string pretrained_checksum;
  std::string weight_decay_mode = "coupled_l2";
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::vector<std::string> warnings;
};

/// `epoch=<n> train_loss=<f> test_acc=<f> fluid=<f> good=<f> dry=<f> tearing=<f>`
/// Undefined per-class accuracies print as `na`.
std::string format_epoch_line(const EpochMetrics& m);

void to_json(nlohmann::json& j, const EpochMetrics& m);
void from_json(const nlohmann::json& j, EpochMetrics& m);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace texshuffle
