#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texshuffle/image.hpp"

namespace texshuffle {

/// Rheology class of an extruded texture window. Order is fixed.
enum class ClassLabel : std::uint8_t { fluid = 0, good = 1, dry = 2, tearing = 3 };

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<ClassLabel, kNumClasses> kAllLabels = {
    ClassLabel::fluid, ClassLabel::good, ClassLabel::dry, ClassLabel::tearing};

constexpr std::size_t label_index(ClassLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

ClassLabel label_from_index(std::size_t index);
std::string_view label_name(ClassLabel label) noexcept;

inline std::ostream& operator<<(std::ostream& out, ClassLabel label) {
  return out << label_name(label);
}

/// Case-insensitive, whitespace-trimmed. nullopt for anything outside the four classes.
std::optional<ClassLabel> parse_label(std::string_view text);

struct TextureSample {
  Image image;
  ClassLabel label = ClassLabel::fluid;
  std::string source_id;
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

/// Ordered samples with a per-class tally kept in sync on insertion.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<TextureSample> samples);

  /// Throws std::invalid_argument for an empty or non-RGB image.
  void add(TextureSample sample);

  [[nodiscard]] const std::vector<TextureSample>& samples() const noexcept {
    return samples_;
  }
  [[nodiscard]] const ClassCounts& class_counts() const noexcept {
    return counts_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
  const TextureSample& operator[](std::size_t i) const { return samples_[i]; }

  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }

 private:
  std::vector<TextureSample> samples_;
  ClassCounts counts_{};
};

struct LabelEntry {
  std::string image_id;
  ClassLabel label = ClassLabel::fluid;

  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

/// Reads a `filename,label` CSV (header required, extra columns ignored).
///
/// Throws IngestionError when the file cannot be read, ValidationError on a
/// missing header column, an unknown label or a duplicate filename. Data rows
/// are numbered from 1 in messages; the header is row 0.
std::vector<LabelEntry> load_label_map(const std::filesystem::path& csv_path);

/// Decodes every mapped image under image_dir, preserving mapping order.
///
/// All missing files are reported together in one IngestionError.
Dataset load_dataset(const std::filesystem::path& image_dir,
                     std::span<const LabelEntry> label_map);

/// Writes samples as PNGs plus `labels.csv` in the layout load_dataset reads.
/// Returns the CSV path.
std::filesystem::path save_dataset(const Dataset& dataset,
                                   const std::filesystem::path& dir);

Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path);

struct Split {
  Dataset train;
  Dataset test;
};

/// Per-class random split: round-half-up(train_fraction * n_c) samples of each
/// class go to train, the rest to test. Both halves keep dataset order.
Split stratified_split(const Dataset& dataset, double train_fraction,
                       std::uint64_t seed);

/// Four-class synthetic texture set separable only by local statistics.
///
/// fluid: fine low-variance noise; good: coarse high-variance noise;
/// dry: fine horizontal stripes; tearing: sparse dark speckles. Every image
/// also carries a random low-frequency gradient and tint, so global layout
/// carries no class information.
Dataset generate_synthetic_textures(int n_per_class, int height, int width,
                                    std::uint64_t seed);

/// Hash over ids, labels and pixels in sample order.
std::string dataset_checksum(const Dataset& dataset);

}  // namespace texshuffle
