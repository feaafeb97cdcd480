#pragma once

#include <cstddef>
#include <cstdint>

namespace tscl {

/// SplitMix64 (Steele, Lea, Flood 2014). Fixed arithmetic, so a seed produces
/// the same stream on every platform; the standard <random> distributions do
/// not guarantee that, so sampling helpers are defined here too.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent child stream keyed by `stream`.
  SplitMix64 split(std::uint64_t stream) const noexcept {
    SplitMix64 mixer(state_ ^ (stream * 0xD1B54A32D192ED03ULL));
    return SplitMix64(mixer());
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform in [0, bound), bound > 0. Rejection removes modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates with SplitMix64 so shuffles reproduce across standard libraries.
template <typename It>
void shuffle(It first, It last, SplitMix64& rng) {
  const auto count = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = count; i > 1; --i) {
    const auto j = rng.below(i);
    using std::swap;
    swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
  }
}

}  // namespace tscl
