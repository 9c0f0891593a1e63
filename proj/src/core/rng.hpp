#pragma once

#include <cstdint>

namespace fda {

// "fda-splitmix64-v1": every random decision in a job comes from a SplitMix64
// sequence whose starting state is derived from (seed, stream, index), so any
// worker can reproduce the draw for item `index` without replaying earlier
// items. Changing anything here changes outputs; bump the version name.
inline constexpr const char* kRngAlgorithm = "fda-splitmix64-v1";

enum class RngStream : std::uint64_t {
  kPairing = 0x7061697269ULL,  // "pairi"
  kCrop = 0x63726f70ULL,       // "crop"
};

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  // Substream for one item of one stream.
  static constexpr SplitMix64 substream(std::uint64_t seed, RngStream stream,
                                        std::uint64_t index) noexcept {
    const std::uint64_t key = splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL) ^
                              splitmix64_mix(static_cast<std::uint64_t>(stream));
    return SplitMix64(splitmix64_mix(key + index * 0x9E3779B97F4A7C15ULL));
  }

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_mix(state_);
  }

  // Unbiased draw in [0, bound) by Lemire's multiply-and-reject.
  constexpr std::uint64_t uniform(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace fda
