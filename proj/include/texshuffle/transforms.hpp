#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "texshuffle/dataset.hpp"
#include "texshuffle/image.hpp"
#include "texshuffle/random.hpp"

namespace texshuffle {

/// Square-patch tiling of the largest patch-aligned region, centered in the image.
struct PatchGrid {
  int patch_size = 0;
  int rows = 0;
  int cols = 0;
  int fitted_height = 0;
  int fitted_width = 0;
  int crop_top = 0;
  int crop_left = 0;

  [[nodiscard]] int patch_count() const noexcept { return rows * cols; }

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

/// Throws std::invalid_argument unless 1 <= patch_size <= min(height, width).
PatchGrid make_patch_grid(int height, int width, int patch_size);

/// Fisher-Yates permutation of [0, count): for i = count-1 down to 1, swap
/// slot i with slot uniform_index(i + 1).
std::vector<int> shuffled_patch_order(int count, RandomStream& rng);

/// Builds the fitted_height x fitted_width output whose k-th patch (row-major)
/// is input patch order[k] of the centered grid.
template <typename T>
Raster<T> assemble_patches(const Raster<T>& image, const PatchGrid& grid,
                           std::span<const int> order) {
  if (static_cast<int>(order.size()) != grid.patch_count()) {
    throw std::invalid_argument("assemble_patches: order size does not match grid");
  }
  Raster<T> out(grid.fitted_height, grid.fitted_width, image.channels);
  const int p = grid.patch_size;
  const std::size_t run = static_cast<std::size_t>(p) * image.channels;
  for (int k = 0; k < grid.patch_count(); ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    const int src_y = grid.crop_top + (src / grid.cols) * p;
    const int src_x = grid.crop_left + (src % grid.cols) * p;
    const int dst_y = (k / grid.cols) * p;
    const int dst_x = (k % grid.cols) * p;
    for (int dy = 0; dy < p; ++dy) {
      const auto from = image.data.begin() +
                        static_cast<std::ptrdiff_t>(image.offset(src_y + dy, src_x));
      std::copy(from, from + static_cast<std::ptrdiff_t>(run),
                out.data.begin() + static_cast<std::ptrdiff_t>(out.offset(dst_y + dy, dst_x)));
    }
  }
  return out;
}

/// Center-crops to the patch grid, permutes the patches uniformly at random
/// and reassembles. Works on 8-bit and normalized images alike.
template <typename T>
Raster<T> patch_and_shuffle(const Raster<T>& image, int patch_size, RandomStream& rng) {
  const PatchGrid grid = make_patch_grid(image.height, image.width, patch_size);
  const std::vector<int> order = shuffled_patch_order(grid.patch_count(), rng);
  return assemble_patches(image, grid, order);
}

/// The fitted patches of an image in row-major grid order, each flattened.
template <typename T>
std::vector<std::vector<T>> extract_patches(const Raster<T>& image, int patch_size) {
  const PatchGrid grid = make_patch_grid(image.height, image.width, patch_size);
  std::vector<std::vector<T>> patches;
  patches.reserve(static_cast<std::size_t>(grid.patch_count()));
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      std::vector<T> patch;
      patch.reserve(static_cast<std::size_t>(patch_size) * patch_size * image.channels);
      for (int dy = 0; dy < patch_size; ++dy) {
        const auto from = image.data.begin() +
                          static_cast<std::ptrdiff_t>(image.offset(
                              grid.crop_top + r * patch_size + dy,
                              grid.crop_left + c * patch_size));
        patch.insert(patch.end(), from,
                     from + static_cast<std::ptrdiff_t>(patch_size) * image.channels);
      }
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

struct AugmentConfig {
  double max_rotation_deg = 15.0;
  double zoom_min = 0.9;
  double zoom_max = 1.1;
  double illumination_min = 0.8;
  double illumination_max = 1.2;
  int expansion_factor = 16;

  /// Throws std::invalid_argument on an inverted or negative range.
  void validate() const;

  /// validate() plus the requirement that both ranges contain 1.0, so the
  /// identity transform stays reachable. Applied to training configs.
  void validate_for_training() const;

  /// Rotation 0, zoom 1, illumination 1.
  static AugmentConfig identity();
};

/// Rotation (reflection padding) then zoom, both about the image center and
/// resampled bilinearly in one pass, then one multiplicative brightness
/// factor clamped to [0, 255]. Parameters are drawn in that order from rng.
Image augment(const Image& image, const AugmentConfig& config, RandomStream& rng);

/// Each sample contributes itself plus expansion_factor - 1 augmented variants
/// (ids suffixed `#aug<k>`), in sample-major order.
Dataset expand_dataset(const Dataset& dataset, const AugmentConfig& config,
                       std::uint64_t seed);

/// Per-channel mean/std of the ImageNet pretraining corpus.
inline constexpr std::array<float, 3> kBackboneMean = {0.485F, 0.456F, 0.406F};
inline constexpr std::array<float, 3> kBackboneStd = {0.229F, 0.224F, 0.225F};

/// Bilinear resize with half-pixel centers and edge clamping.
FloatImage resize_bilinear(const FloatImage& image, int height, int width);

/// Scales 8-bit values to [0, 1].
FloatImage to_unit_range(const Image& image);

/// (v - mean[c]) / std[c] per channel, in place on a copy.
FloatImage standardize(FloatImage unit_image);

/// Unit-range conversion, bilinear resize (skipped when the size already
/// matches) and per-channel standardization.
FloatImage normalize_for_backbone(const Image& image, int target_height = 224,
                                  int target_width = 224);

}  // namespace texshuffle
