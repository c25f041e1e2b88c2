#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "opu/bits.hpp"

namespace opu {

enum class Mode : std::uint8_t { kIntensity = 0, kLinear = 1 };
enum class Storage : std::uint8_t { kCached = 0, kOnTheFly = 1 };

inline constexpr std::size_t kDefaultCacheBudgetBytes = std::size_t{1} << 30;

struct DeviceConfig {
  std::uint64_t seed = 0;
  std::size_t input_dim = 0;   // n
  std::size_t output_dim = 0;  // m
  Mode mode = Mode::kIntensity;
  int quant_bits = 8;
  Storage storage = Storage::kCached;
  std::size_t cache_budget_bytes = kDefaultCacheBudgetBytes;

  void validate() const;
  // Floats per matrix entry: 2 for complex (Intensity), 1 for real (Linear).
  std::size_t floats_per_entry() const noexcept { return mode == Mode::kIntensity ? 2 : 1; }
  std::size_t cached_bytes() const noexcept;

  // The transform is fully determined by these four fields.
  bool same_transform(const DeviceConfig& o) const noexcept {
    return seed == o.seed && input_dim == o.input_dim && output_dim == o.output_dim && mode == o.mode;
  }
};

struct AnalogOutput {
  std::vector<double> values;
  Mode mode = Mode::kIntensity;
};

struct QuantizedOutput {
  std::vector<std::uint16_t> values;
  double scale = 1.0;
  double offset = 0.0;  // nonzero only for shifted Linear-mode outputs
  std::size_t saturated_count = 0;
  int bits = 8;

  double dequantized(std::size_t i) const noexcept { return values[i] * scale + offset; }
  std::vector<double> dequantize() const;
};

// Per-vector max scaling: scale = max / (2^bits - 1). Linear-mode outputs are
// first shifted by offset = min(0, min y). All-zero input gives scale 1.
QuantizedOutput quantize(const AnalogOutput& y, int bits);
// Fixed gain: values are clamped to 2^bits - 1 and clamps are counted.
QuantizedOutput quantize_fixed(std::span<const double> y, int bits, double scale, double offset = 0.0);

// Immutable functional model of the random-projection device. Copies share
// the cached matrix.
class Device {
 public:
  static Device build(const DeviceConfig& config);
  // Explicit matrix, row-major m x n; Intensity entries are interleaved
  // (re, im) pairs. Used for test injection and container import.
  static Device with_matrix(const DeviceConfig& config, std::vector<float> entries);

  const DeviceConfig& config() const noexcept { return config_; }
  std::size_t input_dim() const noexcept { return config_.input_dim; }
  std::size_t output_dim() const noexcept { return config_.output_dim; }
  Mode mode() const noexcept { return config_.mode; }
  bool explicit_matrix() const noexcept { return explicit_; }

  // Entry (i, j); imaginary part is 0 in Linear mode.
  float entry_re(std::size_t i, std::size_t j) const noexcept;
  float entry_im(std::size_t i, std::size_t j) const noexcept;

  AnalogOutput transform_intensity(const BitVector& x) const;
  AnalogOutput transform_linear(std::span<const double> x) const;
  QuantizedOutput transform_quantized(const BitVector& x) const;
  // Row k equals transform_quantized(X[k]) for any thread count (0 = hardware).
  std::vector<QuantizedOutput> transform_batch(const BitBatch& batch, unsigned threads = 0) const;

  // Dense row-major matrix in container layout.
  std::vector<float> materialize() const;

 private:
  Device(DeviceConfig config, std::shared_ptr<const std::vector<float>> matrix, bool is_explicit);

  DeviceConfig config_;
  std::uint64_t key_ = 0;
  std::shared_ptr<const std::vector<float>> matrix_;
  bool explicit_ = false;
};

// Generated entry for (seed, n, i, j, mode) without building a device.
struct Entry {
  float re;
  float im;
};
Entry generate_entry(std::uint64_t seed, Mode mode, std::size_t n, std::size_t i, std::size_t j) noexcept;

}  // namespace opu
