#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace texshuffle {

/// Interleaved (height x width x channels) pixel buffer.
template <typename T>
struct Raster {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int h, int w, int c, T fill = T{})
      : height(h), width(w), channels(c) {
    if (h < 0 || w < 0 || c < 0) {
      throw std::invalid_argument("Raster: negative dimension");
    }
    data.assign(static_cast<std::size_t>(h) * w * c, fill);
  }

  [[nodiscard]] bool empty() const noexcept { return data.empty(); }

  [[nodiscard]] std::size_t offset(int y, int x, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }

  T& at(int y, int x, int c = 0) noexcept { return data[offset(y, x, c)]; }
  const T& at(int y, int x, int c = 0) const noexcept {
    return data[offset(y, x, c)];
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

/// 8-bit RGB image, channel order R, G, B.
using Image = Raster<std::uint8_t>;
/// Real-valued 3-channel image (normalized backbone input).
using FloatImage = Raster<float>;

inline Image make_rgb(int height, int width, std::uint8_t fill = 0) {
  return Image(height, width, 3, fill);
}

}  // namespace texshuffle
