#pragma once

#include <cstdint>
#include <span>

namespace lcslab {

/// Counter-based generator built on the SplitMix64 finalizer. Draw `i` of a
/// stream is a pure function of (key, i), so streams can be split and
/// indexed without carrying state between calls.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent substream key for (seed, tag, index).
  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag,
                                        std::uint64_t index = 0) noexcept {
    return mix(mix(seed + kGolden) ^ mix(tag * 0xD1B54A32D192ED03ULL + 1) ^
               mix(index + 0x632BE59BD9B4E019ULL));
  }

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix(key_ + (counter + 1) * kGolden);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Inverse-CDF draw from a cumulative table whose last entry is 1.
inline std::size_t sample_cumulative(std::span<const double> cdf, double u) noexcept {
  std::size_t i = 0;
  while (i + 1 < cdf.size() && u >= cdf[i]) ++i;
  return i;
}

}  // namespace lcslab
