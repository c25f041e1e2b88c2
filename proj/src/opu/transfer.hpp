#pragma once

#include <cstddef>
#include <cstdint>

#include "opu/datasets.hpp"
#include "opu/device.hpp"
#include "opu/encoders.hpp"

namespace opu {

struct TransferOptions {
  std::uint64_t device_seed = 0;
  std::size_t features = 1024;  // device output dim m
  Storage storage = Storage::kCached;
  int quant_bits = 8;
  EncoderSpec encoder = EncoderSpec::parse("median");
  // Effective ridge penalty is lambda_rel * trace(ΦᵀΦ) / dim on centered features.
  double lambda_rel = 0.1;
  double train_fraction = 0.7;
  std::uint64_t split_seed = 0;
};

struct TransferReport {
  double baseline_train = 0.0;
  double baseline_test = 0.0;
  double opu_train = 0.0;
  double opu_test = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Encodes the base features, projects them through an intensity device,
// dequantizes, and fits ridge on the train split; a ridge fit on the raw
// features is the baseline.
TransferReport transfer_pipeline(const Dataset& data, const TransferOptions& options);

}  // namespace opu
