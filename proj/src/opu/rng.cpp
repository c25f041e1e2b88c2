#include "opu/rng.hpp"

#include <cmath>
#include <numbers>

namespace opu {

std::pair<double, double> gaussian_pair(std::uint64_t key, std::uint64_t counter) noexcept {
  const double u1 = open_unit(counter_bits(key, 2 * counter));
  const double u2 = half_open_unit(counter_bits(key, 2 * counter + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double CounterStream::normal() noexcept {
  const double u1 = open_unit(counter_bits(key_, next_++));
  const double u2 = half_open_unit(counter_bits(key_, next_++));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterStream::below(std::uint64_t bound) noexcept {
  // Lemire-style multiply-high; bias is < bound / 2^64.
  const auto bits = counter_bits(key_, next_++);
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * bound) >> 64);
}

}  // namespace opu
