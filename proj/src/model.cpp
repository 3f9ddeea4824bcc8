#include "texshuffle/model.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <stdexcept>

#include "texshuffle/error.hpp"
#include "texshuffle/random.hpp"
#include "texshuffle/report.hpp"

namespace fs = std::filesystem;
namespace nn = torch::nn;

namespace texshuffle {

namespace {

nn::Conv2d conv3x3(std::int64_t in, std::int64_t out, std::int64_t stride) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1).bias(false));
}

nn::Sequential make_layer(std::int64_t in, std::int64_t out, std::int64_t stride) {
  nn::Sequential layer;
  layer->push_back(BasicBlock(in, out, stride));
  layer->push_back(BasicBlock(out, out, 1));
  return layer;
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  Fnv1a64 hash;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    hash.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return hash.hex();
}

}  // namespace

BasicBlockImpl::BasicBlockImpl(std::int64_t in_channels, std::int64_t out_channels,
                               std::int64_t stride) {
  conv1_ = register_module("conv1", conv3x3(in_channels, out_channels, stride));
  bn1_ = register_module("bn1", nn::BatchNorm2d(out_channels));
  conv2_ = register_module("conv2", conv3x3(out_channels, out_channels, 1));
  bn2_ = register_module("bn2", nn::BatchNorm2d(out_channels));
  if (stride != 1 || in_channels != out_channels) {
    downsample_ = register_module(
        "downsample",
        nn::Sequential(nn::Conv2d(nn::Conv2dOptions(in_channels, out_channels, 1)
                                      .stride(stride)
                                      .bias(false)),
                       nn::BatchNorm2d(out_channels)));
  }
}

torch::Tensor BasicBlockImpl::forward(torch::Tensor x) {
  torch::Tensor identity = downsample_ ? downsample_->forward(x) : x;
  torch::Tensor out = torch::relu(bn1_->forward(conv1_->forward(x)));
  out = bn2_->forward(conv2_->forward(out));
  return torch::relu(out + identity);
}

ResNet18Impl::ResNet18Impl(std::int64_t num_classes, double dropout_p) {
  conv1_ = register_module(
      "conv1", nn::Conv2d(nn::Conv2dOptions(3, 64, 7).stride(2).padding(3).bias(false)));
  bn1_ = register_module("bn1", nn::BatchNorm2d(64));
  layer1_ = register_module("layer1", make_layer(64, 64, 1));
  layer2_ = register_module("layer2", make_layer(64, 128, 2));
  layer3_ = register_module("layer3", make_layer(128, 256, 2));
  layer4_ = register_module("layer4", make_layer(256, kFeatureWidth, 2));
  head_linear_ = nn::Linear(kFeatureWidth, num_classes);
  fc_ = register_module("fc", nn::Sequential(nn::Dropout(dropout_p), head_linear_));

  // torchvision initialization for the backbone; the head keeps the Linear default.
  for (auto& module : modules(/*include_self=*/false)) {
    if (auto* conv = module->as<nn::Conv2d>()) {
      nn::init::kaiming_normal_(conv->weight, 0.0, torch::kFanOut, torch::kReLU);
    } else if (auto* bn = module->as<nn::BatchNorm2d>()) {
      nn::init::ones_(bn->weight);
      nn::init::zeros_(bn->bias);
    }
  }
}

torch::Tensor ResNet18Impl::features(torch::Tensor x) {
  x = torch::relu(bn1_->forward(conv1_->forward(x)));
  x = torch::max_pool2d(x, 3, 2, 1);
  x = layer4_->forward(layer3_->forward(layer2_->forward(layer1_->forward(x))));
  return torch::adaptive_avg_pool2d(x, {1, 1}).flatten(1);
}

torch::Tensor ResNet18Impl::forward(torch::Tensor x) {
  return fc_->forward(features(x));
}

Classifier::Classifier(ClassifierSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
  torch::manual_seed(seed_);
  network_ = ResNet18(spec_.num_classes, spec_.dropout_p);
  provenance_ = {"none", ""};
  if (spec_.pretrained) load_pretrained_backbone();
}

void Classifier::load_pretrained_backbone() {
  const fs::path path = spec_.pretrained_weights;
  if (spec_.pretrained_weights.empty() || !fs::is_regular_file(path)) {
    throw PretrainedWeightsUnavailable(
        "pretrained resnet18 weights requested but " +
        (spec_.pretrained_weights.empty() ? std::string("no weights file was given")
                                          : "'" + path.string() + "' does not exist") +
        "; export them with tools/export_resnet18_weights.py or disable pretraining");
  }

  std::ifstream in(path, std::ios::binary);
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  std::map<std::string, torch::Tensor> state;
  try {
    const c10::IValue loaded = torch::pickle_load(bytes);
    if (!loaded.isGenericDict()) {
      throw PretrainedWeightsUnavailable(
          "weights file '" + path.string() +
          "' is not a plain dict of tensors; save it with torch.save(dict(model.state_dict()), "
          "path)");
    }
    for (const auto& item : loaded.toGenericDict()) {
      state.emplace(item.key().toStringRef(), item.value().toTensor());
    }
  } catch (const c10::Error& e) {
    throw PretrainedWeightsUnavailable(
        "cannot parse weights file '" + path.string() +
        "' as a plain dict of tensors (save it with torch.save(dict(model.state_dict()), path)): " +
        e.what_without_backtrace());
  }

  torch::NoGradGuard no_grad;
  auto copy_into = [&](const std::string& name, torch::Tensor& target) {
    if (name.rfind("fc.", 0) == 0) return;  // head stays randomly initialized
    const auto it = state.find(name);
    if (it == state.end()) {
      throw PretrainedWeightsUnavailable("weights file '" + path.string() +
                                         "' lacks tensor '" + name + "'");
    }
    if (it->second.sizes() != target.sizes()) {
      throw PretrainedWeightsUnavailable("shape mismatch for '" + name + "' in '" +
                                         path.string() + "'");
    }
    target.copy_(it->second.to(target.dtype()));
  };
  for (auto& item : network_->named_parameters()) copy_into(item.key(), item.value());
  for (auto& item : network_->named_buffers()) copy_into(item.key(), item.value());

  provenance_ = {path.string(), file_checksum(path)};
}

namespace {

void check_batch(const torch::Tensor& batch) {
  if (batch.dim() != 4 || batch.size(0) < 1 || batch.size(1) != 3) {
    throw std::invalid_argument("classifier input must be (N, 3, H, W) with N >= 1, got " +
                                c10::str(batch.sizes()));
  }
}

}  // namespace

torch::Tensor Classifier::forward(const torch::Tensor& batch) {
  check_batch(batch);
  return network_->forward(batch);
}

torch::Tensor Classifier::features(const torch::Tensor& batch) {
  check_batch(batch);
  return network_->features(batch);
}

std::vector<ClassLabel> Classifier::predict(const torch::Tensor& batch) {
  const bool was_training = is_training();
  set_training(false);
  torch::NoGradGuard no_grad;
  std::vector<ClassLabel> labels;
  try {
    labels = argmax_labels(forward(batch));
  } catch (...) {
    set_training(was_training);
    throw;
  }
  set_training(was_training);
  return labels;
}

std::int64_t Classifier::head_parameter_count() const {
  std::int64_t count = 0;
  for (const auto& p : network_->head_linear()->parameters()) count += p.numel();
  return count;
}

std::int64_t Classifier::parameter_count() const {
  std::int64_t count = 0;
  for (const auto& p : network_->parameters()) count += p.numel();
  return count;
}

std::string Classifier::parameters_checksum() const {
  Fnv1a64 hash;
  auto feed = [&](const std::string& name, const torch::Tensor& t) {
    hash.update(name);
    const torch::Tensor c = t.detach().contiguous().cpu();
    hash.update(c.data_ptr(), static_cast<std::size_t>(c.nbytes()));
  };
  for (const auto& item : network_->named_parameters()) feed(item.key(), item.value());
  for (const auto& item : network_->named_buffers()) feed(item.key(), item.value());
  return hash.hex();
}

void Classifier::save(const fs::path& path) const {
  torch::serialize::OutputArchive archive;
  network_->save(archive);
  archive.save_to(path.string());
  write_json({{"spec", spec_},
              {"seed", seed_},
              {"pretrained", {{"source", provenance_.source}, {"checksum", provenance_.checksum}}},
              {"weights_checksum", parameters_checksum()}},
             fs::path(path.string() + ".json"));
}

Classifier Classifier::load(const fs::path& path) {
  const nlohmann::json sidecar = read_json(fs::path(path.string() + ".json"));
  ClassifierSpec spec = sidecar.at("spec").get<ClassifierSpec>();
  spec.pretrained = false;  // weights come from the checkpoint itself
  Classifier classifier(spec, sidecar.at("seed").get<std::uint64_t>());
  torch::serialize::InputArchive archive;
  archive.load_from(path.string());
  classifier.network_->load(archive);
  classifier.spec_.pretrained = sidecar.at("spec").at("pretrained").get<bool>();
  classifier.provenance_ = {sidecar.at("pretrained").at("source").get<std::string>(),
                            sidecar.at("pretrained").at("checksum").get<std::string>()};
  return classifier;
}

Classifier build_classifier(const ClassifierSpec& spec, std::uint64_t seed) {
  return Classifier(spec, seed);
}

std::vector<ClassLabel> argmax_labels(const torch::Tensor& logits) {
  if (logits.dim() != 2 || logits.size(1) != static_cast<std::int64_t>(kNumClasses)) {
    throw std::invalid_argument("logits must be (N, 4), got " + c10::str(logits.sizes()));
  }
  const torch::Tensor values = logits.detach().to(torch::kFloat64).contiguous().cpu();
  const auto acc = values.accessor<double, 2>();
  std::vector<ClassLabel> labels;
  labels.reserve(static_cast<std::size_t>(values.size(0)));
  for (std::int64_t i = 0; i < values.size(0); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (acc[i][static_cast<std::int64_t>(c)] > acc[i][static_cast<std::int64_t>(best)]) {
        best = c;
      }
    }
    labels.push_back(label_from_index(best));
  }
  return labels;
}

torch::Tensor to_batch_tensor(std::span<const FloatImage> images) {
  if (images.empty()) {
    throw std::invalid_argument("to_batch_tensor: no images");
  }
  const int h = images.front().height;
  const int w = images.front().width;
  torch::Tensor batch =
      torch::empty({static_cast<std::int64_t>(images.size()), h, w, 3}, torch::kFloat32);
  float* dst = batch.data_ptr<float>();
  for (const auto& img : images) {
    if (img.height != h || img.width != w || img.channels != 3) {
      throw std::invalid_argument("to_batch_tensor: images differ in shape");
    }
    dst = std::copy(img.data.begin(), img.data.end(), dst);
  }
  return batch.permute({0, 3, 1, 2}).contiguous();
}

}  // namespace texshuffle
