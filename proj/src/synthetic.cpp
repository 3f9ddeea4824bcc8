#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "texshuffle/dataset.hpp"
#include "texshuffle/random.hpp"

namespace texshuffle {

namespace {

// Per-pixel luminance offsets around zero for one texture class.
std::vector<double> texture_field(ClassLabel label, int h, int w, RandomStream& rng) {
  std::vector<double> field(static_cast<std::size_t>(h) * w, 0.0);
  auto at = [&](int y, int x) -> double& {
    return field[static_cast<std::size_t>(y) * w + x];
  };

  switch (label) {
    case ClassLabel::fluid:
      for (auto& v : field) v = 6.0 * rng.normal();
      break;

    case ClassLabel::good: {
      // Blocky noise: one draw per 4x4 cell plus a little pixel jitter.
      constexpr int kCell = 4;
      const int ch = (h + kCell - 1) / kCell;
      const int cw = (w + kCell - 1) / kCell;
      std::vector<double> cells(static_cast<std::size_t>(ch) * cw);
      for (auto& c : cells) c = 36.0 * rng.normal();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          at(y, x) = cells[static_cast<std::size_t>(y / kCell) * cw + x / kCell] +
                     3.0 * rng.normal();
        }
      }
      break;
    }

    case ClassLabel::dry: {
      const double period = rng.uniform(3.0, 5.0);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (int y = 0; y < h; ++y) {
        const double stripe =
            35.0 * std::sin(2.0 * std::numbers::pi * y / period + phase);
        for (int x = 0; x < w; ++x) at(y, x) = stripe + 5.0 * rng.normal();
      }
      break;
    }

    case ClassLabel::tearing: {
      for (auto& v : field) v = 5.0 * rng.normal();
      // About one 2x2 speckle per 40 pixels.
      const std::size_t speckles = std::max<std::size_t>(1, field.size() / 40);
      for (std::size_t k = 0; k < speckles; ++k) {
        const int y0 = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(h)));
        const int x0 = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(w)));
        const double depth = rng.uniform(-110.0, -80.0);
        for (int dy = 0; dy < 2 && y0 + dy < h; ++dy) {
          for (int dx = 0; dx < 2 && x0 + dx < w; ++dx) at(y0 + dy, x0 + dx) = depth;
        }
      }
      break;
    }
  }
  return field;
}

Image render_sample(ClassLabel label, int h, int w, RandomStream& rng) {
  const std::vector<double> field = texture_field(label, h, w, rng);

  // Global nuisance: base level, linear gradient in a random direction, tint.
  const double base = rng.uniform(105.0, 150.0);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double slope = rng.uniform(0.0, 40.0);
  const double gx = std::cos(angle) * slope;
  const double gy = std::sin(angle) * slope;
  const double tint[3] = {rng.uniform(0.92, 1.08), rng.uniform(0.92, 1.08),
                          rng.uniform(0.92, 1.08)};

  Image image = make_rgb(h, w);
  for (int y = 0; y < h; ++y) {
    const double ny = h > 1 ? static_cast<double>(y) / (h - 1) - 0.5 : 0.0;
    for (int x = 0; x < w; ++x) {
      const double nx = w > 1 ? static_cast<double>(x) / (w - 1) - 0.5 : 0.0;
      const double lum = base + gx * nx + gy * ny +
                         field[static_cast<std::size_t>(y) * w + x];
      for (int c = 0; c < 3; ++c) {
        image.at(y, x, c) = static_cast<std::uint8_t>(
            std::clamp(std::lround(lum * tint[c]), 0L, 255L));
      }
    }
  }
  return image;
}

}  // namespace

Dataset generate_synthetic_textures(int n_per_class, int height, int width,
                                    std::uint64_t seed) {
  if (n_per_class < 1) {
    throw std::invalid_argument("generate_synthetic_textures: n_per_class must be >= 1");
  }
  if (height < 16 || width < 16) {
    throw std::invalid_argument("generate_synthetic_textures: size must be at least 16x16");
  }

  Dataset dataset;
  for (int i = 0; i < n_per_class; ++i) {
    for (const ClassLabel label : kAllLabels) {
      RandomStream rng(derive_seed(
          seed, {stream_tag("synthetic"), label_index(label), static_cast<std::uint64_t>(i)}));
      std::string id = "synthetic_" + std::string(label_name(label)) + "_" +
                       std::to_string(i) + ".png";
      dataset.add({render_sample(label, height, width, rng), label, std::move(id)});
    }
  }
  return dataset;
}

}  // namespace texshuffle
