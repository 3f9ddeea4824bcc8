#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "texshuffle/transforms.hpp"

namespace texshuffle {

struct ClassifierSpec {
  std::string backbone = "resnet18";
  int num_classes = static_cast<int>(kNumClasses);
  double dropout_p = 0.5;
  bool pretrained = true;
  /// Serialized torchvision-layout state dict; required when pretrained.
  std::string pretrained_weights;

  void validate() const;
};

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 5e-5;
  double weight_decay = 1e-3;
  int patch_size = 56;
  double train_fraction = 0.8;
  int batch_size = 32;
  std::uint64_t seed = 0;
  bool patch_shuffle_enabled = false;

  int input_size = 224;
  /// Materialize expand_dataset up front instead of augmenting per access.
  bool static_expansion = false;
  bool augment_enabled = true;
  AugmentConfig augment;
  ClassifierSpec model;

  void validate() const;
};

void to_json(nlohmann::json& j, const AugmentConfig& c);
void from_json(const nlohmann::json& j, AugmentConfig& c);
void to_json(nlohmann::json& j, const ClassifierSpec& s);
void from_json(const nlohmann::json& j, ClassifierSpec& s);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace texshuffle
