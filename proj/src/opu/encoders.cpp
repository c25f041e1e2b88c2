#include "opu/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opu/errors.hpp"

namespace opu {

EncoderSpec EncoderSpec::parse(const std::string& text) {
  if (text == "sign") return sign();
  if (text == "median") return {EncoderScheme::kThresholdPerFeature, 0.0, std::nullopt};
  if (text.rfind("global:", 0) == 0) {
    const auto value = text.substr(7);
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(t)) {
      fail(ErrorCode::kInvalidConfig, "bad global threshold '" + value + "'");
    }
    return global(t);
  }
  fail(ErrorCode::kInvalidConfig, "unknown encoder '" + text + "' (expected sign, median, or global:T)");
}

std::string EncoderSpec::describe() const {
  switch (scheme) {
    case EncoderScheme::kSignBit:
      return "sign";
    case EncoderScheme::kThresholdPerFeature:
      return "median";
    case EncoderScheme::kThresholdGlobal: {
      std::ostringstream os;
      os << "global:" << global_threshold;
      return os.str();
    }
  }
  return "unknown";
}

EncoderSpec fit_thresholds(MatrixView data) {
  if (data.rows == 0 || data.cols == 0) fail(ErrorCode::kInvalidArgument, "cannot fit thresholds on empty data");
  if (data.data.size() != data.rows * data.cols) fail(ErrorCode::kDimensionMismatch, "data size does not match shape");
  for (double v : data.data) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "cannot fit thresholds on non-finite data");
  }
  std::vector<double> thresholds(data.cols);
  std::vector<double> column(data.rows);
  for (std::size_t c = 0; c < data.cols; ++c) {
    for (std::size_t r = 0; r < data.rows; ++r) column[r] = data.data[r * data.cols + c];
    const auto mid = column.begin() + static_cast<std::ptrdiff_t>(data.rows / 2);
    std::nth_element(column.begin(), mid, column.end());
    double median = *mid;
    if (data.rows % 2 == 0) {
      const double lower = *std::max_element(column.begin(), mid);
      median = 0.5 * (lower + median);
    }
    thresholds[c] = median;
  }
  return {EncoderScheme::kThresholdPerFeature, 0.0, std::move(thresholds)};
}

BitVector encode(const EncoderSpec& spec, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "cannot encode non-finite feature");
  }
  BitVector bits(x.size());
  switch (spec.scheme) {
    case EncoderScheme::kSignBit:
      for (std::size_t j = 0; j < x.size(); ++j) bits.set(j, x[j] >= 0.0);
      break;
    case EncoderScheme::kThresholdGlobal:
      for (std::size_t j = 0; j < x.size(); ++j) bits.set(j, x[j] >= spec.global_threshold);
      break;
    case EncoderScheme::kThresholdPerFeature: {
      if (!spec.thresholds) fail(ErrorCode::kInvalidArgument, "per-feature encoder used before fit_thresholds");
      const auto& t = *spec.thresholds;
      if (t.size() != x.size()) {
        fail(ErrorCode::kDimensionMismatch, "encoder fitted on " + std::to_string(t.size()) +
                                                " features, input has " + std::to_string(x.size()));
      }
      for (std::size_t j = 0; j < x.size(); ++j) bits.set(j, x[j] >= t[j]);
      break;
    }
  }
  return bits;
}

BitBatch encode_rows(const EncoderSpec& spec, MatrixView data) {
  std::vector<BitVector> rows;
  rows.reserve(data.rows);
  for (std::size_t r = 0; r < data.rows; ++r) rows.push_back(encode(spec, data.row(r)));
  return BitBatch(std::move(rows));
}

}  // namespace opu
