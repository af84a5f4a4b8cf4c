#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace fdstat {

/// A reproducible random stream identified by a 64-bit key.
///
/// Child streams are derived from the key alone (never from the engine
/// state), so a replicate's stream is the same whatever order or thread
/// the replicates run on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key), engine_(mix(key)) {}

  RngStream child(std::uint64_t tag, std::uint64_t index = 0) const {
    return RngStream(mix(key_ ^ mix(tag + 0x9e3779b97f4a7c15ULL * (index + 1))));
  }

  std::uint64_t key() const noexcept { return key_; }
  std::mt19937_64& engine() noexcept { return engine_; }

  double normal() { return std::normal_distribution<double>()(engine_); }
  double uniform() { return std::uniform_real_distribution<double>()(engine_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  int sign() { return std::bernoulli_distribution(0.5)(engine_) ? 1 : -1; }

  /// splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

// Stream tags. Keep these stable: changing one changes every seeded result.
namespace stream_tag {
inline constexpr std::uint64_t bootstrap = 1;
inline constexpr std::uint64_t directions = 2;
inline constexpr std::uint64_t replicate = 3;
inline constexpr std::uint64_t data = 4;
inline constexpr std::uint64_t test = 5;
inline constexpr std::uint64_t folds = 6;
inline constexpr std::uint64_t slope = 7;
inline constexpr std::uint64_t group = 8;
}  // namespace stream_tag

}  // namespace fdstat
