#include "opu/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "opu/errors.hpp"
#include "opu/rng.hpp"

namespace opu {
namespace {

constexpr double kHalfVarianceScale = 0.70710678118654752440;  // sqrt(1/2)

std::uint64_t mode_key(std::uint64_t seed, Mode mode) noexcept {
  return derive_key(seed, mode == Mode::kIntensity ? kIntensityTag : kLinearTag);
}

Entry entry_from_key(std::uint64_t key, Mode mode, std::uint64_t counter) noexcept {
  const auto [z0, z1] = gaussian_pair(key, counter);
  if (mode == Mode::kIntensity) {
    return {static_cast<float>(z0 * kHalfVarianceScale), static_cast<float>(z1 * kHalfVarianceScale)};
  }
  return {static_cast<float>(z0), 0.0f};
}

}  // namespace

void DeviceConfig::validate() const {
  if (input_dim == 0 || output_dim == 0) {
    fail(ErrorCode::kInvalidArgument, "device dimensions must be positive (n=" + std::to_string(input_dim) +
                                          ", m=" + std::to_string(output_dim) + ")");
  }
  if (quant_bits < 1 || quant_bits > 16) {
    fail(ErrorCode::kInvalidArgument, "quant_bits must be in [1, 16], got " + std::to_string(quant_bits));
  }
}

std::size_t DeviceConfig::cached_bytes() const noexcept {
  const auto entries = static_cast<long double>(input_dim) * output_dim * floats_per_entry() * sizeof(float);
  if (entries > static_cast<long double>(std::numeric_limits<std::size_t>::max())) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(entries);
}

std::vector<double> QuantizedOutput::dequantize() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = dequantized(i);
  return out;
}

QuantizedOutput quantize(const AnalogOutput& y, int bits) {
  if (bits < 1 || bits > 16) fail(ErrorCode::kInvalidArgument, "quant_bits must be in [1, 16]");
  double lo = 0.0;
  double hi = 0.0;
  for (double v : y.values) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "cannot quantize non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo < 0.0 && y.mode == Mode::kIntensity) {
    fail(ErrorCode::kInvalidArgument, "intensity output has a negative entry");
  }
  const double levels = static_cast<double>((1U << bits) - 1);
  const double range = hi - lo;
  QuantizedOutput q;
  q.bits = bits;
  q.offset = lo;
  q.values.assign(y.values.size(), 0);
  if (range == 0.0) {
    q.scale = 1.0;
    return q;
  }
  q.scale = range / levels;
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    // y * levels / range rather than y / scale: exact at representable midpoints.
    const double level = std::round((y.values[i] - lo) * levels / range);
    q.values[i] = static_cast<std::uint16_t>(std::clamp(level, 0.0, levels));
  }
  return q;
}

QuantizedOutput quantize_fixed(std::span<const double> y, int bits, double scale, double offset) {
  if (bits < 1 || bits > 16) fail(ErrorCode::kInvalidArgument, "quant_bits must be in [1, 16]");
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::kInvalidArgument, "scale must be positive");
  const double levels = static_cast<double>((1U << bits) - 1);
  QuantizedOutput q;
  q.bits = bits;
  q.scale = scale;
  q.offset = offset;
  q.values.assign(y.size(), 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) fail(ErrorCode::kNonFinite, "cannot quantize non-finite value");
    const double level = std::round((y[i] - offset) / scale);
    if (level > levels || level < 0.0) ++q.saturated_count;
    q.values[i] = static_cast<std::uint16_t>(std::clamp(level, 0.0, levels));
  }
  return q;
}

Entry generate_entry(std::uint64_t seed, Mode mode, std::size_t n, std::size_t i, std::size_t j) noexcept {
  return entry_from_key(mode_key(seed, mode), mode, static_cast<std::uint64_t>(i) * n + j);
}

Device::Device(DeviceConfig config, std::shared_ptr<const std::vector<float>> matrix, bool is_explicit)
    : config_(config), key_(mode_key(config.seed, config.mode)), matrix_(std::move(matrix)), explicit_(is_explicit) {}

Device Device::build(const DeviceConfig& config) {
  config.validate();
  if (config.storage == Storage::kOnTheFly) return Device(config, nullptr, false);
  if (config.cached_bytes() > config.cache_budget_bytes) {
    fail(ErrorCode::kMemoryBudget, "cached matrix needs " + std::to_string(config.cached_bytes()) +
                                       " bytes, budget is " + std::to_string(config.cache_budget_bytes) +
                                       "; use on-the-fly storage");
  }
  Device generator(config, nullptr, false);
  return Device(config, std::make_shared<const std::vector<float>>(generator.materialize()), false);
}

Device Device::with_matrix(const DeviceConfig& config, std::vector<float> entries) {
  config.validate();
  const auto expected = config.input_dim * config.output_dim * config.floats_per_entry();
  if (entries.size() != expected) {
    fail(ErrorCode::kDimensionMismatch, "explicit matrix has " + std::to_string(entries.size()) +
                                            " floats, expected " + std::to_string(expected));
  }
  auto cfg = config;
  cfg.storage = Storage::kCached;
  return Device(cfg, std::make_shared<const std::vector<float>>(std::move(entries)), true);
}

float Device::entry_re(std::size_t i, std::size_t j) const noexcept {
  if (matrix_) return (*matrix_)[(i * config_.input_dim + j) * config_.floats_per_entry()];
  return entry_from_key(key_, config_.mode, static_cast<std::uint64_t>(i) * config_.input_dim + j).re;
}

float Device::entry_im(std::size_t i, std::size_t j) const noexcept {
  if (config_.mode == Mode::kLinear) return 0.0f;
  if (matrix_) return (*matrix_)[(i * config_.input_dim + j) * 2 + 1];
  return entry_from_key(key_, config_.mode, static_cast<std::uint64_t>(i) * config_.input_dim + j).im;
}

AnalogOutput Device::transform_intensity(const BitVector& x) const {
  if (config_.mode != Mode::kIntensity) fail(ErrorCode::kModeMismatch, "transform_intensity on a linear-mode device");
  if (x.size() != config_.input_dim) {
    fail(ErrorCode::kDimensionMismatch, "input length " + std::to_string(x.size()) + " != n = " +
                                            std::to_string(config_.input_dim));
  }
  const std::size_t n = config_.input_dim;
  AnalogOutput out{std::vector<double>(config_.output_dim, 0.0), Mode::kIntensity};
  // Accumulation runs over set bits in increasing j for both storage kinds.
  for (std::size_t i = 0; i < config_.output_dim; ++i) {
    double re = 0.0;
    double im = 0.0;
    if (matrix_) {
      const float* row = matrix_->data() + i * n * 2;
      x.for_each_set([&](std::size_t j) {
        re += row[2 * j];
        im += row[2 * j + 1];
      });
    } else {
      const std::uint64_t base = static_cast<std::uint64_t>(i) * n;
      x.for_each_set([&](std::size_t j) {
        const auto e = entry_from_key(key_, Mode::kIntensity, base + j);
        re += e.re;
        im += e.im;
      });
    }
    out.values[i] = re * re + im * im;
  }
  return out;
}

AnalogOutput Device::transform_linear(std::span<const double> x) const {
  if (config_.mode != Mode::kLinear) fail(ErrorCode::kModeMismatch, "transform_linear on an intensity-mode device");
  if (x.size() != config_.input_dim) {
    fail(ErrorCode::kDimensionMismatch, "input length " + std::to_string(x.size()) + " != n = " +
                                            std::to_string(config_.input_dim));
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "linear transform input has a non-finite entry");
  }
  const std::size_t n = config_.input_dim;
  AnalogOutput out{std::vector<double>(config_.output_dim, 0.0), Mode::kLinear};
  for (std::size_t i = 0; i < config_.output_dim; ++i) {
    double acc = 0.0;
    if (matrix_) {
      const float* row = matrix_->data() + i * n;
      for (std::size_t j = 0; j < n; ++j) acc += static_cast<double>(row[j]) * x[j];
    } else {
      const std::uint64_t base = static_cast<std::uint64_t>(i) * n;
      for (std::size_t j = 0; j < n; ++j) {
        acc += static_cast<double>(entry_from_key(key_, Mode::kLinear, base + j).re) * x[j];
      }
    }
    out.values[i] = acc;
  }
  return out;
}

QuantizedOutput Device::transform_quantized(const BitVector& x) const {
  return quantize(transform_intensity(x), config_.quant_bits);
}

std::vector<QuantizedOutput> Device::transform_batch(const BitBatch& batch, unsigned threads) const {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "empty batch");
  if (batch.width() != config_.input_dim) {
    fail(ErrorCode::kDimensionMismatch, "batch row length " + std::to_string(batch.width()) + " != n = " +
                                            std::to_string(config_.input_dim));
  }
  std::vector<QuantizedOutput> out(batch.rows());
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, batch.rows()));
  if (threads <= 1) {
    for (std::size_t k = 0; k < batch.rows(); ++k) out[k] = transform_quantized(batch[k]);
    return out;
  }
  // Rows are independent; each worker owns a contiguous slice.
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (batch.rows() + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(batch.rows(), lo + chunk);
        for (std::size_t k = lo; k < hi; ++k) out[k] = transform_quantized(batch[k]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<float> Device::materialize() const {
  if (matrix_) return *matrix_;
  const std::size_t n = config_.input_dim;
  const std::size_t per = config_.floats_per_entry();
  std::vector<float> out(n * config_.output_dim * per);
  for (std::size_t i = 0; i < config_.output_dim; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto e = entry_from_key(key_, config_.mode, static_cast<std::uint64_t>(i) * n + j);
      out[(i * n + j) * per] = e.re;
      if (per == 2) out[(i * n + j) * 2 + 1] = e.im;
    }
  }
  return out;
}

}  // namespace opu
