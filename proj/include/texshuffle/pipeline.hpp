#pragma once

#include <cstdint>

#include "texshuffle/image.hpp"
#include "texshuffle/transforms.hpp"

namespace texshuffle {

/// Per-sample preprocessing shared by training and evaluation.
///
/// Training: augment (when enabled) -> normalize -> patch_and_shuffle (when
/// enabled). Evaluation skips augmentation. Augmentation and shuffling draw
/// from separate streams keyed by (seed, epoch, sample index), so toggling
/// the shuffle stage leaves every other stage bit-identical.
struct PipelineConfig {
  AugmentConfig augment;
  bool augment_enabled = true;
  int input_height = 224;
  int input_width = 224;
  int patch_size = 56;
  bool shuffle_enabled = false;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class PipelineStage : std::uint8_t { train, eval };

FloatImage prepare_input(const Image& image, const PipelineConfig& config,
                         PipelineStage stage, std::uint64_t epoch,
                         std::uint64_t sample_index);

}  // namespace texshuffle
