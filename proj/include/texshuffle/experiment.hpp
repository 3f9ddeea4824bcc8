#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "texshuffle/config.hpp"
#include "texshuffle/dataset.hpp"
#include "texshuffle/evaluation.hpp"

namespace texshuffle {

enum class ExperimentMode { standard, patch_shuffle, compare, synth };

std::string mode_name(ExperimentMode mode);
ExperimentMode parse_mode(const std::string& name);

struct DataSource {
  bool synthetic = false;
  std::filesystem::path data_dir;
  /// Defaults to `<data_dir>/labels.csv` when empty.
  std::filesystem::path labels_csv;
  int n_per_class = 100;
  int image_size = 64;
};

struct ExperimentManifest {
  ExperimentMode mode = ExperimentMode::compare;
  DataSource data;
  TrainConfig train;
  std::filesystem::path out_dir = "runs";
  bool save_model = false;
};

void to_json(nlohmann::json& j, const ExperimentManifest& m);
void from_json(const nlohmann::json& j, ExperimentManifest& m);

struct ExperimentOutcome {
  std::vector<RunReport> runs;
  std::optional<ComparisonReport> comparison;
  std::vector<std::filesystem::path> artifacts;
};

/// Synthetic data is generated from the run seed; directory data is read
/// through the CSV label map.
Dataset load_source(const DataSource& source, std::uint64_t seed);

/// Executes one manifest and writes every artifact under out_dir:
///   manifest.json, split.json          always (synth: manifest.json only)
///   control.{json,log}                 standard, compare
///   experimental.{json,log}            patch-shuffle, compare
///   comparison.{txt,csv,json}, accuracy.svg    compare
///   images/, labels.csv                synth
/// In compare mode both arms see the same split and seed and differ only in
/// the shuffle stage. Epoch lines are echoed to `log`.
ExperimentOutcome run_experiment(const ExperimentManifest& manifest, std::ostream& log);

}  // namespace texshuffle
