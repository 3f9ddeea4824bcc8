#include "texshuffle/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "texshuffle/error.hpp"

using nlohmann::json;

namespace texshuffle {

void ClassifierSpec::validate() const {
  if (backbone != "resnet18") {
    throw std::invalid_argument("unsupported backbone '" + backbone + "'");
  }
  if (num_classes != static_cast<int>(kNumClasses)) {
    throw std::invalid_argument("num_classes must be " + std::to_string(kNumClasses));
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw std::invalid_argument("dropout probability must be in [0, 1)");
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be non-negative");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw std::invalid_argument("train fraction must be in (0, 1]");
  }
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (input_size < 1) throw std::invalid_argument("input size must be positive");
  if (patch_size < 1 || patch_size > input_size) {
    throw std::invalid_argument("patch size must be in [1, input size]");
  }
  augment.validate_for_training();
  model.validate();
}

void to_json(json& j, const AugmentConfig& c) {
  j = json{{"max_rotation_deg", c.max_rotation_deg},
           {"zoom_range", {c.zoom_min, c.zoom_max}},
           {"illumination_range", {c.illumination_min, c.illumination_max}},
           {"expansion_factor", c.expansion_factor}};
}

void from_json(const json& j, AugmentConfig& c) {
  const AugmentConfig d;
  c.max_rotation_deg = j.value("max_rotation_deg", d.max_rotation_deg);
  const json zoom = j.value("zoom_range", json::array({d.zoom_min, d.zoom_max}));
  c.zoom_min = zoom.at(0).get<double>();
  c.zoom_max = zoom.at(1).get<double>();
  const json light =
      j.value("illumination_range", json::array({d.illumination_min, d.illumination_max}));
  c.illumination_min = light.at(0).get<double>();
  c.illumination_max = light.at(1).get<double>();
  c.expansion_factor = j.value("expansion_factor", d.expansion_factor);
}

void to_json(json& j, const ClassifierSpec& s) {
  j = json{{"backbone", s.backbone},
           {"num_classes", s.num_classes},
           {"dropout_p", s.dropout_p},
           {"pretrained", s.pretrained},
           {"pretrained_weights", s.pretrained_weights}};
}

void from_json(const json& j, ClassifierSpec& s) {
  const ClassifierSpec d;
  s.backbone = j.value("backbone", d.backbone);
  s.num_classes = j.value("num_classes", d.num_classes);
  s.dropout_p = j.value("dropout_p", d.dropout_p);
  s.pretrained = j.value("pretrained", d.pretrained);
  s.pretrained_weights = j.value("pretrained_weights", d.pretrained_weights);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"epochs", c.epochs},
           {"learning_rate", c.learning_rate},
           {"weight_decay", c.weight_decay},
           {"patch_size", c.patch_size},
           {"train_fraction", c.train_fraction},
           {"batch_size", c.batch_size},
           {"seed", c.seed},
           {"patch_shuffle_enabled", c.patch_shuffle_enabled},
           {"input_size", c.input_size},
           {"static_expansion", c.static_expansion},
           {"augment_enabled", c.augment_enabled},
           {"augment", c.augment},
           {"model", c.model}};
}

void from_json(const json& j, TrainConfig& c) {
  const TrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.patch_size = j.value("patch_size", d.patch_size);
  c.train_fraction = j.value("train_fraction", d.train_fraction);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.seed = j.value("seed", d.seed);
  c.patch_shuffle_enabled = j.value("patch_shuffle_enabled", d.patch_shuffle_enabled);
  c.input_size = j.value("input_size", d.input_size);
  c.static_expansion = j.value("static_expansion", d.static_expansion);
  c.augment_enabled = j.value("augment_enabled", d.augment_enabled);
  c.augment = j.contains("augment") ? j.at("augment").get<AugmentConfig>() : d.augment;
  c.model = j.contains("model") ? j.at("model").get<ClassifierSpec>() : d.model;
}

std::string format_epoch_line(const EpochMetrics& m) {
  std::string line = "epoch=" + std::to_string(m.epoch);
  char buf[64];
  std::snprintf(buf, sizeof buf, " train_loss=%.6f", m.train_loss);
  line += buf;
  std::snprintf(buf, sizeof buf, " test_acc=%.4f", m.test_overall_accuracy);
  line += buf;
  for (const ClassLabel label : kAllLabels) {
    const auto& acc = m.per_class_accuracy[label_index(label)];
    line += ' ';
    line += label_name(label);
    if (acc) {
      std::snprintf(buf, sizeof buf, "=%.4f", *acc);
      line += buf;
    } else {
      line += "=na";
    }
  }
  return line;
}

void to_json(json& j, const EpochMetrics& m) {
  json per_class = json::object();
  for (const ClassLabel label : kAllLabels) {
    const auto& acc = m.per_class_accuracy[label_index(label)];
    per_class[std::string(label_name(label))] = acc ? json(*acc) : json(nullptr);
  }
  j = json{{"epoch", m.epoch},
           {"train_loss", m.train_loss},
           {"train_accuracy", m.train_accuracy},
           {"test_overall_accuracy", m.test_overall_accuracy},
           {"per_class_accuracy", per_class},
           {"confusion", m.confusion}};
}

void from_json(const json& j, EpochMetrics& m) {
  m.epoch = j.at("epoch").get<int>();
  m.train_loss = j.at("train_loss").get<double>();
  m.train_accuracy = j.value("train_accuracy", 0.0);
  m.test_overall_accuracy = j.at("test_overall_accuracy").get<double>();
  const json& per_class = j.at("per_class_accuracy");
  for (const ClassLabel label : kAllLabels) {
    const json& v = per_class.at(std::string(label_name(label)));
    m.per_class_accuracy[label_index(label)] =
        v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  }
  m.confusion = j.at("confusion").get<ConfusionMatrix>();
}

void to_json(json& j, const RunReport& r) {
  j = json{{"arm", r.arm},
           {"config", r.config},
           {"epochs", r.epochs},
           {"wall_time_seconds", r.wall_time_seconds},
           {"weights_checksum", r.weights_checksum},
           {"split",
            {{"train_checksum", r.train_split_checksum},
             {"test_checksum", r.test_split_checksum},
             {"train_size", r.train_size},
             {"test_size", r.test_size}}},
           {"pretrained", {{"source", r.pretrained_source}, {"checksum", r.pretrained_checksum}}},
           {"optimizer",
            {{"name", "adam"},
             {"weight_decay_mode", r.weight_decay_mode},
             {"beta1", r.adam_beta1},
             {"beta2", r.adam_beta2},
             {"eps", r.adam_eps}}},
           {"warnings", r.warnings}};
}

void from_json(const json& j, RunReport& r) {
  r.arm = j.at("arm").get<std::string>();
  r.config = j.at("config").get<TrainConfig>();
  r.epochs = j.at("epochs").get<std::vector<EpochMetrics>>();
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  r.weights_checksum = j.at("weights_checksum").get<std::string>();
  const json& split = j.at("split");
  r.train_split_checksum = split.at("train_checksum").get<std::string>();
  r.test_split_checksum = split.at("test_checksum").get<std::string>();
  r.train_size = split.at("train_size").get<std::size_t>();
  r.test_size = split.at("test_size").get<std::size_t>();
  r.pretrained_source = j.at("pretrained").at("source").get<std::string>();
  r.pretrained_checksum = j.at("pretrained").at("checksum").get<std::string>();
  const json& opt = j.at("optimizer");
  r.weight_decay_mode = opt.at("weight_decay_mode").get<std::string>();
  r.adam_beta1 = opt.at("beta1").get<double>();
  r.adam_beta2 = opt.at("beta2").get<double>();
  r.adam_eps = opt.at("eps").get<double>();
  r.warnings = j.value("warnings", std::vector<std::string>{});
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read " + path.string());
  return json::parse(in);
}

}  // namespace texshuffle
