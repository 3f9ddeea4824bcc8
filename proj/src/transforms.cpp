#include "texshuffle/transforms.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace texshuffle {

PatchGrid make_patch_grid(int height, int width, int patch_size) {
  if (patch_size < 1) {
    throw std::invalid_argument("patch size must be at least 1, got " +
                                std::to_string(patch_size));
  }
  if (patch_size > std::min(height, width)) {
    throw std::invalid_argument("patch size " + std::to_string(patch_size) +
                                " exceeds image dimensions " + std::to_string(height) +
                                "x" + std::to_string(width));
  }
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.rows = height / patch_size;
  grid.cols = width / patch_size;
  grid.fitted_height = grid.rows * patch_size;
  grid.fitted_width = grid.cols * patch_size;
  grid.crop_top = (height - grid.fitted_height) / 2;
  grid.crop_left = (width - grid.fitted_width) / 2;
  return grid;
}

std::vector<int> shuffled_patch_order(int count, RandomStream& rng) {
  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i-- > 1;) {
    std::swap(order[i], order[rng.uniform_index(i + 1)]);
  }
  return order;
}

void AugmentConfig::validate() const {
  if (max_rotation_deg < 0.0) {
    throw std::invalid_argument("max rotation must be non-negative");
  }
  if (!(zoom_min > 0.0 && zoom_min <= zoom_max)) {
    throw std::invalid_argument("zoom range must be positive and ordered");
  }
  if (!(illumination_min >= 0.0 && illumination_min <= illumination_max)) {
    throw std::invalid_argument("illumination range must be non-negative and ordered");
  }
  if (expansion_factor < 1) {
    throw std::invalid_argument("expansion factor must be at least 1");
  }
}

void AugmentConfig::validate_for_training() const {
  validate();
  if (!(zoom_min <= 1.0 && zoom_max >= 1.0)) {
    throw std::invalid_argument("zoom range must contain 1.0");
  }
  if (!(illumination_min <= 1.0 && illumination_max >= 1.0)) {
    throw std::invalid_argument("illumination range must contain 1.0");
  }
}

AugmentConfig AugmentConfig::identity() {
  AugmentConfig config;
  config.max_rotation_deg = 0.0;
  config.zoom_min = config.zoom_max = 1.0;
  config.illumination_min = config.illumination_max = 1.0;
  return config;
}

namespace {

// Mirror an integer coordinate into [0, n) without repeating the edge pixel.
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

Image warp_rotate_zoom(const Image& image, double angle_rad, double zoom) {
  const int h = image.height;
  const int w = image.width;
  const double cy = (h - 1) / 2.0;
  const double cx = (w - 1) / 2.0;
  const double cos_a = std::cos(angle_rad) / zoom;
  const double sin_a = std::sin(angle_rad) / zoom;

  Image out = make_rgb(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse map: output pixel back into the source frame.
      const double dx = x - cx;
      const double dy = y - cy;
      const double sx = cx + cos_a * dx + sin_a * dy;
      const double sy = cy - sin_a * dx + cos_a * dy;
      const double fx = std::floor(sx);
      const double fy = std::floor(sy);
      const double ax = sx - fx;
      const double ay = sy - fy;
      const int x0 = reflect_index(static_cast<int>(fx), w);
      const int x1 = reflect_index(static_cast<int>(fx) + 1, w);
      const int y0 = reflect_index(static_cast<int>(fy), h);
      const int y1 = reflect_index(static_cast<int>(fy) + 1, h);
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - ax) * image.at(y0, x0, c) + ax * image.at(y0, x1, c);
        const double bottom = (1 - ax) * image.at(y1, x0, c) + ax * image.at(y1, x1, c);
        const double v = (1 - ay) * top + ay * bottom;
        out.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace

Image augment(const Image& image, const AugmentConfig& config, RandomStream& rng) {
  config.validate();
  if (image.empty() || image.channels != 3) {
    throw std::invalid_argument("augment: expected a non-empty RGB image");
  }
  const double angle_deg = rng.uniform(-config.max_rotation_deg, config.max_rotation_deg);
  const double zoom = rng.uniform(config.zoom_min, config.zoom_max);
  const double brightness = rng.uniform(config.illumination_min, config.illumination_max);

  Image out = (angle_deg == 0.0 && zoom == 1.0)
                  ? image
                  : warp_rotate_zoom(image, angle_deg * std::numbers::pi / 180.0, zoom);
  if (brightness != 1.0) {
    for (auto& v : out.data) {
      v = static_cast<std::uint8_t>(std::clamp(std::lround(v * brightness), 0L, 255L));
    }
  }
  return out;
}

Dataset expand_dataset(const Dataset& dataset, const AugmentConfig& config,
                       std::uint64_t seed) {
  if (dataset.empty()) {
    throw std::invalid_argument("expand_dataset: dataset is empty");
  }
  config.validate();
  Dataset expanded;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const TextureSample& sample = dataset[i];
    expanded.add(sample);
    for (int k = 1; k < config.expansion_factor; ++k) {
      RandomStream rng(derive_seed(
          seed, {stream_tag("expand"), i, static_cast<std::uint64_t>(k)}));
      expanded.add({augment(sample.image, config, rng), sample.label,
                    sample.source_id + "#aug" + std::to_string(k)});
    }
  }
  return expanded;
}

FloatImage to_unit_range(const Image& image) {
  FloatImage out(image.height, image.width, image.channels);
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    out.data[i] = static_cast<float>(image.data[i]) / 255.0F;
  }
  return out;
}

FloatImage resize_bilinear(const FloatImage& image, int height, int width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("resize_bilinear: target size must be positive");
  }
  if (image.empty()) {
    throw std::invalid_argument("resize_bilinear: empty image");
  }
  if (height == image.height && width == image.width) return image;

  FloatImage out(height, width, image.channels);
  const double scale_y = static_cast<double>(image.height) / height;
  const double scale_x = static_cast<double>(image.width) / width;
  for (int y = 0; y < height; ++y) {
    const double sy = std::max(0.0, (y + 0.5) * scale_y - 0.5);
    const int y0 = std::min(static_cast<int>(sy), image.height - 1);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const float ay = static_cast<float>(sy - y0);
    for (int x = 0; x < width; ++x) {
      const double sx = std::max(0.0, (x + 0.5) * scale_x - 0.5);
      const int x0 = std::min(static_cast<int>(sx), image.width - 1);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const float ax = static_cast<float>(sx - x0);
      for (int c = 0; c < image.channels; ++c) {
        const float top = (1 - ax) * image.at(y0, x0, c) + ax * image.at(y0, x1, c);
        const float bottom = (1 - ax) * image.at(y1, x0, c) + ax * image.at(y1, x1, c);
        out.at(y, x, c) = (1 - ay) * top + ay * bottom;
      }
    }
  }
  return out;
}

FloatImage standardize(FloatImage unit_image) {
  if (unit_image.channels != 3) {
    throw std::invalid_argument("standardize: expected 3 channels");
  }
  for (std::size_t i = 0; i < unit_image.data.size(); ++i) {
    const std::size_t c = i % 3;
    unit_image.data[i] = (unit_image.data[i] - kBackboneMean[c]) / kBackboneStd[c];
  }
  return unit_image;
}

FloatImage normalize_for_backbone(const Image& image, int target_height,
                                  int target_width) {
  if (image.empty() || image.channels != 3) {
    throw std::invalid_argument("normalize_for_backbone: expected a non-empty RGB image");
  }
  return standardize(resize_bilinear(to_unit_range(image), target_height, target_width));
}

}  // namespace texshuffle
