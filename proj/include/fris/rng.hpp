// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

namespace fris {

// SplitMix64 output mix.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t h = 0xcbf29ce484222325ull) noexcept {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t fnv1a64(std::uint64_t v, std::uint64_t h) noexcept {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffull;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Counter-mode SplitMix64 stream.
///
/// Output i is splitmix64_mix(key + (i+1)*GOLDEN), so a stream is fully
/// determined by its key and the draw index. Streams are derived from
/// (master_seed, trial, tag) via FNV-1a, which keeps independent concerns
/// (channel draws, initial configurations, baseline port draws) on disjoint
/// streams regardless of how many values each consumes.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : state_(key) {}

  static CounterRng stream(std::uint64_t master_seed, std::uint64_t trial,
                           std::string_view tag) noexcept {
    std::uint64_t h = fnv1a64(master_seed, 0xcbf29ce484222325ull);
    h = fnv1a64(trial, h);
    h = fnv1a64(tag, h);
    return CounterRng(h);
  }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    return splitmix64_mix(state_);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t rej = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r < rej);
    return r % n;
  }

  /// Box-Muller pair of independent standard normals.
  std::pair<double, double> normal_pair() noexcept {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// Circularly symmetric complex normal, unit total variance.
  std::complex<double> cnormal() noexcept {
    const auto [x, y] = normal_pair();
    return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
  }

 private:
  std::uint64_t state_;
};

}  // namespace fris
