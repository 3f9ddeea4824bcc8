#include "texshuffle/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "texshuffle/error.hpp"
#include "texshuffle/evaluation.hpp"
#include "texshuffle/random.hpp"

namespace texshuffle {

namespace {

torch::Tensor label_tensor(const std::vector<ClassLabel>& labels) {
  torch::Tensor t = torch::empty({static_cast<std::int64_t>(labels.size())}, torch::kInt64);
  auto* p = t.data_ptr<std::int64_t>();
  for (const ClassLabel label : labels) *p++ = static_cast<std::int64_t>(label_index(label));
  return t;
}

}  // namespace

PipelineConfig pipeline_for(const TrainConfig& config) {
  PipelineConfig pipeline;
  pipeline.augment = config.augment;
  // A statically expanded set is already augmented.
  pipeline.augment_enabled = config.augment_enabled && !config.static_expansion;
  pipeline.input_height = config.input_size;
  pipeline.input_width = config.input_size;
  pipeline.patch_size = config.patch_size;
  pipeline.shuffle_enabled = config.patch_shuffle_enabled;
  pipeline.seed = derive_seed(config.seed, {stream_tag("pipeline")});
  return pipeline;
}

EpochMetrics evaluate(Classifier& classifier, const Dataset& test_set,
                      const PipelineConfig& pipeline, int epoch, int batch_size) {
  if (test_set.empty()) {
    throw std::invalid_argument("evaluate: test set is empty");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("evaluate: batch size must be at least 1");
  }
  const bool was_training = classifier.is_training();
  classifier.set_training(false);
  torch::NoGradGuard no_grad;

  std::vector<ClassLabel> predictions;
  std::vector<ClassLabel> truths;
  predictions.reserve(test_set.size());
  truths.reserve(test_set.size());
  std::vector<FloatImage> inputs;
  for (std::size_t start = 0; start < test_set.size(); start += batch_size) {
    const std::size_t stop = std::min(test_set.size(), start + batch_size);
    inputs.clear();
    for (std::size_t i = start; i < stop; ++i) {
      inputs.push_back(prepare_input(test_set[i].image, pipeline, PipelineStage::eval,
                                     static_cast<std::uint64_t>(epoch), i));
      truths.push_back(test_set[i].label);
    }
    const auto batch_labels = argmax_labels(classifier.forward(to_batch_tensor(inputs)));
    predictions.insert(predictions.end(), batch_labels.begin(), batch_labels.end());
  }
  classifier.set_training(was_training);
  return metrics_from_confusion(epoch, 0.0, confusion_matrix(predictions, truths));
}

TrainResult train(const TrainConfig& config, const Dataset& train_set,
                  const Dataset& test_set, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: training set is empty");
  if (test_set.empty()) throw std::invalid_argument("train: test set is empty");

  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.arm = config.patch_shuffle_enabled ? "experimental" : "control";
  report.config = config;
  report.train_split_checksum = dataset_checksum(train_set);
  report.test_split_checksum = dataset_checksum(test_set);
  report.train_size = train_set.size();
  report.test_size = test_set.size();
  for (const ClassLabel label : kAllLabels) {
    if (test_set.class_counts()[label_index(label)] == 0) {
      report.warnings.push_back("test set has no '" + std::string(label_name(label)) +
                                "' samples; its accuracy is undefined");
    }
  }

  Classifier classifier =
      build_classifier(config.model, derive_seed(config.seed, {stream_tag("model")}));
  report.pretrained_source = classifier.provenance().source;
  report.pretrained_checksum = classifier.provenance().checksum;
  // Dropout masks draw from the global generator.
  torch::manual_seed(derive_seed(config.seed, {stream_tag("dropout")}));

  torch::optim::Adam optimizer(
      classifier.network()->parameters(),
      torch::optim::AdamOptions(config.learning_rate)
          .betas({report.adam_beta1, report.adam_beta2})
          .eps(report.adam_eps)
          .weight_decay(config.weight_decay));

  const PipelineConfig pipeline = pipeline_for(config);
  const Dataset expanded =
      config.static_expansion
          ? expand_dataset(train_set, config.augment,
                           derive_seed(config.seed, {stream_tag("expand")}))
          : Dataset{};
  const Dataset& training_data = config.static_expansion ? expanded : train_set;

  std::vector<std::size_t> order(training_data.size());
  std::vector<FloatImage> inputs;
  std::vector<ClassLabel> targets;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomStream order_rng(derive_seed(
        config.seed, {stream_tag("order"), static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = order.size(); i-- > 1;) {
      std::swap(order[i], order[order_rng.uniform_index(i + 1)]);
    }

    classifier.set_training(true);
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    std::size_t seen = 0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      inputs.clear();
      targets.clear();
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        inputs.push_back(prepare_input(training_data[idx].image, pipeline,
                                       PipelineStage::train,
                                       static_cast<std::uint64_t>(epoch), idx));
        targets.push_back(training_data[idx].label);
      }
      // BatchNorm cannot normalize a single sample in training mode.
      if (inputs.size() == 1 && order.size() > 1) continue;

      const torch::Tensor logits = classifier.forward(to_batch_tensor(inputs));
      const torch::Tensor target = label_tensor(targets);
      const torch::Tensor loss = torch::nn::functional::cross_entropy(logits, target);
      const double loss_value = loss.item<double>();
      if (!std::isfinite(loss_value)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_index + 1));
      }
      optimizer.zero_grad();
      loss.backward();
      optimizer.step();

      loss_sum += loss_value * static_cast<double>(inputs.size());
      seen += inputs.size();
      correct += logits.argmax(1).eq(target).sum().item<std::int64_t>();
    }

    EpochMetrics metrics = evaluate(classifier, test_set, pipeline, epoch, config.batch_size);
    metrics.train_loss = loss_sum / static_cast<double>(seen);
    metrics.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    report.epochs.push_back(metrics);
    if (on_epoch) on_epoch(metrics);
  }

  report.weights_checksum = classifier.parameters_checksum();
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(report), std::move(classifier)};
}

}  // namespace texshuffle
