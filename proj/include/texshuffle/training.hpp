#pragma once

#include <functional>

#include "texshuffle/config.hpp"
#include "texshuffle/dataset.hpp"
#include "texshuffle/model.hpp"
#include "texshuffle/pipeline.hpp"
#include "texshuffle/report.hpp"

namespace texshuffle {

/// Training and evaluation pipeline derived from a run configuration.
PipelineConfig pipeline_for(const TrainConfig& config);

/// Runs the classifier in evaluation mode over the whole test set and tallies
/// the confusion matrix. Inputs go through the evaluation pipeline (no
/// augmentation, shuffle stage as configured) keyed by `epoch`.
EpochMetrics evaluate(Classifier& classifier, const Dataset& test_set,
                      const PipelineConfig& pipeline, int epoch, int batch_size = 32);

using EpochCallback = std::function<void(const EpochMetrics&)>;

struct TrainResult {
  RunReport report;
  Classifier classifier;
};

/// Adam on mean cross-entropy with a test evaluation after every epoch.
///
/// Each epoch draws a fresh training order, so with a fixed seed the whole
/// run is reproducible on one platform. Throws TrainingError on a non-finite
/// loss and std::invalid_argument on empty data or a bad config.
TrainResult train(const TrainConfig& config, const Dataset& train_set,
                  const Dataset& test_set, const EpochCallback& on_epoch = {});

}  // namespace texshuffle
