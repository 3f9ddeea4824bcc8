#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

namespace texshuffle {

/// Seeded random stream with platform-independent draws.
///
/// The standard distributions are implementation-defined, so the draws used
/// for permutations, splits and augmentations are spelled out here on top of
/// the raw mt19937_64 output.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Real in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a sequence of stream coordinates (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts);

/// Stable 64-bit tag for a stream name, used as a derive_seed coordinate.
std::uint64_t stream_tag(std::string_view name);

/// FNV-1a 64-bit running hash.
class Fnv1a64 {
 public:
  void update(const void* bytes, std::size_t size);
  void update(std::string_view text) { update(text.data(), text.size()); }
  [[nodiscard]] std::uint64_t value() const noexcept { return state_; }
  [[nodiscard]] std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace texshuffle
