#pragma once

// Brute-force reference implementations used only by tests. They avoid the
// library code paths they check: plain loops, maps and the raw engine.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <unistd.h>
#include <vector>

#include "texshuffle/dataset.hpp"
#include "texshuffle/image.hpp"

namespace oracle {

// Fisher-Yates over a raw mt19937_64 with rejection sampling, matching the
// draw convention the shuffle promises.
inline std::vector<int> fisher_yates(int count, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<int> perm;
  for (int i = 0; i < count; ++i) perm.push_back(i);
  for (int i = count - 1; i >= 1; --i) {
    const std::uint64_t n = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit = (~std::uint64_t{0} - n + 1) % n;
    std::uint64_t x = engine();
    while (x < limit) x = engine();
    const int j = static_cast<int>(x % n);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

// Patches by direct per-pixel indexing, row-major patch order.
template <typename T>
std::vector<std::vector<T>> patches(const texshuffle::Raster<T>& img, int p) {
  const int rows = img.height / p;
  const int cols = img.width / p;
  const int top = (img.height - rows * p) / 2;
  const int left = (img.width - cols * p) / 2;
  std::vector<std::vector<T>> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::vector<T> patch;
      for (int y = 0; y < p; ++y) {
        for (int x = 0; x < p; ++x) {
          for (int ch = 0; ch < img.channels; ++ch) {
            patch.push_back(img.data[((top + r * p + y) * img.width + left + c * p + x) *
                                         img.channels + ch]);
          }
        }
      }
      out.push_back(std::move(patch));
    }
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> sorted_patches(const texshuffle::Raster<T>& img, int p) {
  auto ps = patches(img, p);
  std::sort(ps.begin(), ps.end());
  return ps;
}

using Matrix = std::vector<std::vector<long long>>;

inline Matrix tally(const std::vector<int>& predictions, const std::vector<int>& truths) {
  std::map<std::pair<int, int>, long long> counts;
  for (std::size_t i = 0; i < truths.size(); ++i) counts[{truths[i], predictions[i]}] += 1;
  Matrix m(4, std::vector<long long>(4, 0));
  for (const auto& [key, n] : counts) m[key.first][key.second] = n;
  return m;
}

inline double overall(const Matrix& m) {
  long long hit = 0;
  long long all = 0;
  for (int t = 0; t < 4; ++t) {
    for (int p = 0; p < 4; ++p) {
      all += m[t][p];
      if (t == p) hit += m[t][p];
    }
  }
  return static_cast<double>(hit) / static_cast<double>(all);
}

inline std::optional<double> recall(const Matrix& m, int c) {
  long long row = 0;
  for (int p = 0; p < 4; ++p) row += m[c][p];
  if (row == 0) return std::nullopt;
  return static_cast<double>(m[c][c]) / static_cast<double>(row);
}

// 1-based epoch index of the first maximum.
inline int argmax_first(const std::vector<double>& values) {
  int best = 0;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    bool beaten = false;
    for (int j = 0; j < i; ++j) beaten = beaten || values[j] >= values[i];
    if (!beaten) best = i;
  }
  return best + 1;
}

inline double mean(const std::vector<double>& values) {
  long double s = 0;
  for (double v : values) s += v;
  return static_cast<double>(s / values.size());
}

inline texshuffle::Image random_image(int h, int w, std::mt19937_64& engine) {
  texshuffle::Image img(h, w, 3);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(engine() & 0xFF);
  return img;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("texshuffle_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
