#pragma once

#include <cstdint>
#include <utility>

namespace opu {

// Counter-based generation. Every value is a pure function of (key, counter),
// so matrix entries can be regenerated in any order without stored state.

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kIntensityTag = 0x494E54454E534954ULL;  // "INTENSIT"
inline constexpr std::uint64_t kLinearTag = 0x4C494E4541524D58ULL;     // "LINEARMX"

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) noexcept {
  return splitmix64(seed ^ tag);
}

constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) noexcept {
  return splitmix64(key ^ splitmix64(counter));
}

// Uniform on (0, 1] and [0, 1) respectively, 53-bit resolution.
inline double open_unit(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}
inline double half_open_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Box-Muller on counters (2c, 2c+1); returns two independent N(0,1) draws.
std::pair<double, double> gaussian_pair(std::uint64_t key, std::uint64_t counter) noexcept;

// Sequential view over the counter scheme for datasets and weight init.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t tag) : key_(derive_key(seed, tag)) {}

  double uniform() noexcept { return half_open_unit(counter_bits(key_, next_++)); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Consumes two counters per call and keeps only the cosine branch.
  double normal() noexcept;
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t next_ = 0;
};

}  // namespace opu
