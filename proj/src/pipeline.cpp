#include "texshuffle/pipeline.hpp"

#include <stdexcept>

namespace texshuffle {

void PipelineConfig::validate() const {
  augment.validate_for_training();
  if (input_height < 1 || input_width < 1) {
    throw std::invalid_argument("input size must be positive");
  }
  if (shuffle_enabled) {
    // Throws on an unusable patch size.
    (void)make_patch_grid(input_height, input_width, patch_size);
  }
}

FloatImage prepare_input(const Image& image, const PipelineConfig& config,
                         PipelineStage stage, std::uint64_t epoch,
                         std::uint64_t sample_index) {
  const std::uint64_t stage_tag = stage == PipelineStage::train
                                      ? stream_tag("train")
                                      : stream_tag("eval");
  const Image* source = &image;
  Image augmented;
  if (stage == PipelineStage::train && config.augment_enabled) {
    RandomStream rng(derive_seed(
        config.seed, {stage_tag, stream_tag("augment"), epoch, sample_index}));
    augmented = augment(image, config.augment, rng);
    source = &augmented;
  }

  FloatImage normalized =
      normalize_for_backbone(*source, config.input_height, config.input_width);
  if (!config.shuffle_enabled) return normalized;

  RandomStream rng(derive_seed(
      config.seed, {stage_tag, stream_tag("shuffle"), epoch, sample_index}));
  return patch_and_shuffle(normalized, config.patch_size, rng);
}

}  // namespace texshuffle
