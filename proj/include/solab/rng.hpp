#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace solab {

/// SplitMix64 output finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic, splittable random stream (SplitMix64, Steele/Lea/Flood 2014).
///
/// The state is a single 64-bit counter advanced by the golden-ratio gamma, so
/// the output sequence depends only on the seed and the number of draws. All
/// derived quantities (bounded indices, bipolar bits) are computed from the raw
/// 64-bit outputs with platform-independent integer arithmetic, which makes
/// every run reproducible bit-for-bit across compilers and standard libraries.
///
/// Streams are split by hashing the parent seed with a tag; see split().
class RngStream {
  __extension__ using u128 = unsigned __int128;

 public:
  static constexpr std::string_view kAlgorithm = "splitmix64/v1";

  explicit RngStream(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    ++draws_;
    return mix64(state_);
  }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection; n > 0.
  std::size_t uniform_index(std::size_t n) noexcept {
    const auto bound = static_cast<std::uint64_t>(n);
    auto product = static_cast<u128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<u128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::size_t>(product >> 64);
  }

  /// Uniform real in [0, 1) with 53 bits of resolution.
  double uniform_real() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Independent child stream keyed by `tag`; does not advance this stream.
  RngStream split(std::uint64_t tag) const noexcept {
    return RngStream(derive(seed_, tag));
  }

  /// Seed of the child stream `tag` of a stream seeded with `seed`.
  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) noexcept {
    return mix64(seed ^ mix64(tag + kGamma));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t seed_;
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace solab
