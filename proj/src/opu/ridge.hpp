#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "opu/device.hpp"

namespace opu {

// Identifies the feature map a model was trained on. Raw features use the
// default value.
struct FeaturePipelineId {
  std::string encoder;  // EncoderSpec::describe(), empty for raw features
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  Mode mode = Mode::kIntensity;

  static FeaturePipelineId raw() { return {}; }
  friend bool operator==(const FeaturePipelineId&, const FeaturePipelineId&) = default;
};

struct RidgeModel {
  Eigen::MatrixXd weights;  // features x outputs
  double lambda = 0.0;
  FeaturePipelineId pipeline;
};

// weights = (ΦᵀΦ + λI)⁻¹ Φᵀ T via Cholesky.
RidgeModel fit_ridge(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, double lambda,
                     FeaturePipelineId pipeline = FeaturePipelineId::raw());

Eigen::MatrixXd predict(const RidgeModel& model, const Eigen::MatrixXd& features, const FeaturePipelineId& pipeline);

}  // namespace opu
