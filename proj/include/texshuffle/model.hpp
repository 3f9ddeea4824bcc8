#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "texshuffle/config.hpp"
#include "texshuffle/dataset.hpp"
#include "texshuffle/image.hpp"

namespace texshuffle {

class BasicBlockImpl : public torch::nn::Module {
 public:
  BasicBlockImpl(std::int64_t in_channels, std::int64_t out_channels, std::int64_t stride);
  torch::Tensor forward(torch::Tensor x);

 private:
  torch::nn::Conv2d conv1_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr};
  torch::nn::Conv2d conv2_{nullptr};
  torch::nn::BatchNorm2d bn2_{nullptr};
  torch::nn::Sequential downsample_{nullptr};
};
TORCH_MODULE(BasicBlock);

/// ResNet-18 with the final layer replaced by dropout + linear.
///
/// Submodule names follow torchvision (conv1, bn1, layer1..layer4) so a
/// torchvision state dict maps onto it key for key; the head is `fc.1`.
class ResNet18Impl : public torch::nn::Module {
 public:
  static constexpr std::int64_t kFeatureWidth = 512;

  ResNet18Impl(std::int64_t num_classes, double dropout_p);

  /// Globally pooled backbone output, (batch, 512).
  torch::Tensor features(torch::Tensor x);
  torch::Tensor forward(torch::Tensor x);

  const torch::nn::Linear& head_linear() const { return head_linear_; }

 private:
  torch::nn::Conv2d conv1_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr};
  torch::nn::Sequential layer1_{nullptr};
  torch::nn::Sequential layer2_{nullptr};
  torch::nn::Sequential layer3_{nullptr};
  torch::nn::Sequential layer4_{nullptr};
  torch::nn::Sequential fc_{nullptr};
  torch::nn::Linear head_linear_{nullptr};
};
TORCH_MODULE(ResNet18);

struct PretrainedProvenance {
  std::string source;    // weights file path, or "none"
  std::string checksum;  // FNV-1a of the file bytes, empty when not pretrained
};

/// A ResNet-18 texture classifier and the spec it was built from.
class Classifier {
 public:
  Classifier(ClassifierSpec spec, std::uint64_t seed);

  /// Logits (batch, num_classes). Throws std::invalid_argument unless the
  /// batch is (N, 3, H, W) with N >= 1.
  torch::Tensor forward(const torch::Tensor& batch);

  /// Pooled backbone features (batch, 512).
  torch::Tensor features(const torch::Tensor& batch);

  /// Argmax labels computed in evaluation mode without gradients; the
  /// previous train/eval mode is restored afterwards.
  std::vector<ClassLabel> predict(const torch::Tensor& batch);

  void set_training(bool training) { network_->train(training); }
  [[nodiscard]] bool is_training() const { return network_->is_training(); }

  ResNet18& network() noexcept { return network_; }
  [[nodiscard]] const ClassifierSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const PretrainedProvenance& provenance() const noexcept {
    return provenance_;
  }

  /// Parameters of the dropout + linear head only.
  [[nodiscard]] std::int64_t head_parameter_count() const;
  [[nodiscard]] std::int64_t parameter_count() const;

  /// Hash over every parameter and buffer, in registration order.
  [[nodiscard]] std::string parameters_checksum() const;

  /// Writes `<path>` (torch serialized module) and `<path>.json` (spec, seed,
  /// provenance, checksum).
  void save(const std::filesystem::path& path) const;
  static Classifier load(const std::filesystem::path& path);

 private:
  void load_pretrained_backbone();

  ClassifierSpec spec_;
  std::uint64_t seed_ = 0;
  PretrainedProvenance provenance_;
  ResNet18 network_{nullptr};
};

/// Seeds the global torch generator, constructs the network and, when the
/// spec asks for it, copies pretrained backbone weights. Throws
/// PretrainedWeightsUnavailable instead of silently training from scratch.
Classifier build_classifier(const ClassifierSpec& spec, std::uint64_t seed);

/// Row-wise argmax; the lowest class index wins ties.
std::vector<ClassLabel> argmax_labels(const torch::Tensor& logits);

/// Stacks equally sized HWC images into an (N, 3, H, W) float tensor.
torch::Tensor to_batch_tensor(std::span<const FloatImage> images);

}  // namespace texshuffle
