#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opu/bits.hpp"

namespace opu {

enum class EncoderScheme { kThresholdGlobal, kThresholdPerFeature, kSignBit };

// Binarization of real-valued features. Comparisons are x >= threshold, so
// ties encode to 1.
struct EncoderSpec {
  EncoderScheme scheme = EncoderScheme::kSignBit;
  double global_threshold = 0.0;
  std::optional<std::vector<double>> thresholds;  // per-feature, set by fit_thresholds

  static EncoderSpec sign() { return {}; }
  static EncoderSpec global(double t) { return {EncoderScheme::kThresholdGlobal, t, std::nullopt}; }

  // "sign", "median", or "global:T".
  static EncoderSpec parse(const std::string& text);
  std::string describe() const;

  bool fitted() const noexcept { return scheme != EncoderScheme::kThresholdPerFeature || thresholds.has_value(); }

  friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

// Row-major data view.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t r) const { return data.subspan(r * cols, cols); }
};

// Per-feature medians (mean of the two middle values for even row counts).
EncoderSpec fit_thresholds(MatrixView data);

BitVector encode(const EncoderSpec& spec, std::span<const double> x);
BitBatch encode_rows(const EncoderSpec& spec, MatrixView data);

}  // namespace opu
