#include "texshuffle/random.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace texshuffle {

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_index: empty range");
  }
  const std::uint64_t bound = n;
  // Reject the short tail so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t draw = engine_();
  while (draw < threshold) {
    draw = engine_();
  }
  return static_cast<std::size_t>(draw % bound);
}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  double u1 = uniform01();
  while (u1 <= std::numeric_limits<double>::min()) {
    u1 = uniform01();
  }
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = splitmix64(base);
  for (const std::uint64_t part : parts) {
    state = splitmix64(state ^ splitmix64(part + 0x632be59bd9b4e019ULL));
  }
  return state;
}

std::uint64_t stream_tag(std::string_view name) {
  Fnv1a64 hash;
  hash.update(name);
  return hash.value();
}

void Fnv1a64::update(const void* bytes, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ULL;
  }
}

std::string Fnv1a64::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace texshuffle
