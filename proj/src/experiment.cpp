#include "texshuffle/experiment.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "texshuffle/error.hpp"
#include "texshuffle/random.hpp"
#include "texshuffle/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace texshuffle {

std::string mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::standard: return "standard";
    case ExperimentMode::patch_shuffle: return "patch-shuffle";
    case ExperimentMode::compare: return "compare";
    case ExperimentMode::synth: return "synth";
  }
  return "unknown";
}

ExperimentMode parse_mode(const std::string& name) {
  for (const auto mode : {ExperimentMode::standard, ExperimentMode::patch_shuffle,
                          ExperimentMode::compare, ExperimentMode::synth}) {
    if (mode_name(mode) == name) return mode;
  }
  throw std::invalid_argument("unknown mode '" + name + "'");
}

void to_json(json& j, const ExperimentManifest& m) {
  j = json{{"mode", mode_name(m.mode)},
           {"data",
            {{"synthetic", m.data.synthetic},
             {"data_dir", m.data.data_dir.string()},
             {"labels_csv", m.data.labels_csv.string()},
             {"n_per_class", m.data.n_per_class},
             {"image_size", m.data.image_size}}},
           {"train", m.train},
           {"out_dir", m.out_dir.string()},
           {"save_model", m.save_model}};
}

void from_json(const json& j, ExperimentManifest& m) {
  const ExperimentManifest d;
  m.mode = parse_mode(j.value("mode", mode_name(d.mode)));
  const json data = j.value("data", json::object());
  m.data.synthetic = data.value("synthetic", d.data.synthetic);
  m.data.data_dir = data.value("data_dir", std::string{});
  m.data.labels_csv = data.value("labels_csv", std::string{});
  m.data.n_per_class = data.value("n_per_class", d.data.n_per_class);
  m.data.image_size = data.value("image_size", d.data.image_size);
  m.train = j.contains("train") ? j.at("train").get<TrainConfig>() : d.train;
  m.out_dir = j.value("out_dir", d.out_dir.string());
  m.save_model = j.value("save_model", d.save_model);
}

Dataset load_source(const DataSource& source, std::uint64_t seed) {
  if (source.synthetic) {
    return generate_synthetic_textures(source.n_per_class, source.image_size,
                                       source.image_size,
                                       derive_seed(seed, {stream_tag("synthetic-data")}));
  }
  if (source.data_dir.empty()) {
    throw IngestionError("no data source: give a data directory or use synthetic data");
  }
  const fs::path csv =
      source.labels_csv.empty() ? source.data_dir / "labels.csv" : source.labels_csv;
  const auto label_map = load_label_map(csv);
  return load_dataset(source.data_dir, label_map);
}

namespace {

std::string config_header(const RunReport& report) {
  const TrainConfig& c = report.config;
  std::ostringstream out;
  out << "# arm=" << report.arm << " epochs=" << c.epochs << " lr=" << c.learning_rate
      << " weight_decay=" << c.weight_decay << " weight_decay_mode=" << report.weight_decay_mode
      << " patch_size=" << c.patch_size << " split=" << c.train_fraction
      << " batch_size=" << c.batch_size << " seed=" << c.seed
      << " input_size=" << c.input_size
      << " patch_shuffle=" << (c.patch_shuffle_enabled ? "on" : "off")
      << " static_expansion=" << (c.static_expansion ? "on" : "off") << '\n';
  return out.str();
}

RunReport run_arm(const TrainConfig& base, bool shuffle, const Split& split,
                  const ExperimentManifest& manifest, std::ostream& log,
                  ExperimentOutcome& outcome) {
  TrainConfig config = base;
  config.patch_shuffle_enabled = shuffle;
  const std::string arm = shuffle ? "experimental" : "control";

  const fs::path log_path = manifest.out_dir / (arm + ".log");
  std::ofstream log_file(log_path);
  if (!log_file) throw IngestionError("cannot write " + log_path.string());

  RunReport preview;
  preview.arm = arm;
  preview.config = config;
  log_file << config_header(preview);
  log_file << "# split train=" << dataset_checksum(split.train)
           << " test=" << dataset_checksum(split.test) << '\n';
  log << "[" << arm << "] training on " << split.train.size() << " samples, testing on "
      << split.test.size() << '\n';

  TrainResult result = train(config, split.train, split.test, [&](const EpochMetrics& m) {
    const std::string line = format_epoch_line(m);
    log_file << line << '\n' << std::flush;
    log << "[" << arm << "] " << line << '\n' << std::flush;
  });
  for (const auto& w : result.report.warnings) {
    log_file << "# warning: " << w << '\n';
    log << "[" << arm << "] warning: " << w << '\n';
  }

  const fs::path report_path = manifest.out_dir / (arm + ".json");
  write_json(result.report, report_path);
  outcome.artifacts.push_back(log_path);
  outcome.artifacts.push_back(report_path);
  if (manifest.save_model) {
    const fs::path model_path = manifest.out_dir / (arm + ".pt");
    result.classifier.save(model_path);
    outcome.artifacts.push_back(model_path);
  }
  return result.report;
}

void write_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentManifest& manifest, std::ostream& log) {
  manifest.train.validate();
  fs::create_directories(manifest.out_dir);
  ExperimentOutcome outcome;

  write_json(manifest, manifest.out_dir / "manifest.json");
  outcome.artifacts.push_back(manifest.out_dir / "manifest.json");

  const Dataset dataset = load_source(manifest.data, manifest.train.seed);

  if (manifest.mode == ExperimentMode::synth) {
    outcome.artifacts.push_back(save_dataset(dataset, manifest.out_dir));
    log << "wrote " << dataset.size() << " synthetic samples to " << manifest.out_dir.string()
        << '\n';
    return outcome;
  }

  const Split split = stratified_split(
      dataset, manifest.train.train_fraction,
      derive_seed(manifest.train.seed, {stream_tag("split")}));
  if (split.test.empty()) {
    throw ValidationError("train fraction leaves the test set empty; lower --split");
  }
  json split_json{{"train_checksum", dataset_checksum(split.train)},
                  {"test_checksum", dataset_checksum(split.test)},
                  {"train_ids", json::array()},
                  {"test_ids", json::array()}};
  for (const auto& s : split.train) split_json["train_ids"].push_back(s.source_id);
  for (const auto& s : split.test) split_json["test_ids"].push_back(s.source_id);
  write_json(split_json, manifest.out_dir / "split.json");
  outcome.artifacts.push_back(manifest.out_dir / "split.json");
  log << "split train=" << split_json["train_checksum"].get<std::string>()
      << " test=" << split_json["test_checksum"].get<std::string>() << '\n';

  switch (manifest.mode) {
    case ExperimentMode::standard:
      outcome.runs.push_back(run_arm(manifest.train, false, split, manifest, log, outcome));
      break;
    case ExperimentMode::patch_shuffle:
      outcome.runs.push_back(run_arm(manifest.train, true, split, manifest, log, outcome));
      break;
    case ExperimentMode::compare: {
      outcome.runs.push_back(run_arm(manifest.train, false, split, manifest, log, outcome));
      outcome.runs.push_back(run_arm(manifest.train, true, split, manifest, log, outcome));
      ComparisonReport comparison = compare_runs(outcome.runs[0], outcome.runs[1]);
      const std::string table = render_table(comparison);
      write_text(table, manifest.out_dir / "comparison.txt");
      write_text(render_csv(comparison), manifest.out_dir / "comparison.csv");
      write_json(comparison_to_json(comparison), manifest.out_dir / "comparison.json");
      write_text(render_accuracy_svg(comparison), manifest.out_dir / "accuracy.svg");
      for (const char* name : {"comparison.txt", "comparison.csv", "comparison.json",
                               "accuracy.svg"}) {
        outcome.artifacts.push_back(manifest.out_dir / name);
      }
      log << table;
      outcome.comparison = std::move(comparison);
      break;
    }
    case ExperimentMode::synth:
      break;
  }
  return outcome;
}

}  // namespace texshuffle
