#include "opu/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opu/errors.hpp"

namespace opu {

RidgeModel fit_ridge(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, double lambda,
                     FeaturePipelineId pipeline) {
  if (features.rows() == 0) fail(ErrorCode::kInvalidArgument, "ridge needs at least one sample");
  if (features.rows() != targets.rows()) {
    fail(ErrorCode::kDimensionMismatch, "features have " + std::to_string(features.rows()) + " rows, targets " +
                                            std::to_string(targets.rows()));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  if (!features.allFinite() || !targets.allFinite()) fail(ErrorCode::kNonFinite, "ridge inputs are not finite");

  Eigen::MatrixXd gram = features.transpose() * features;
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = features.transpose() * targets;

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    fail(ErrorCode::kSingular, "normal equations are singular (lambda = " + std::to_string(lambda) + ")");
  }
  RidgeModel model{llt.solve(rhs), lambda, std::move(pipeline)};

  const double residual = (gram * model.weights - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max({1.0, rhs.cwiseAbs().maxCoeff(),
                                 gram.cwiseAbs().maxCoeff() * model.weights.cwiseAbs().maxCoeff()});
  if (!(residual <= 1e-6 * scale)) {
    fail(ErrorCode::kSingular, "normal-equation residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return model;
}

Eigen::MatrixXd predict(const RidgeModel& model, const Eigen::MatrixXd& features, const FeaturePipelineId& pipeline) {
  if (!(pipeline == model.pipeline)) {
    fail(ErrorCode::kIdentityMismatch, "features come from a different pipeline than the model was fitted on");
  }
  if (features.cols() != model.weights.rows()) {
    fail(ErrorCode::kDimensionMismatch, "feature width " + std::to_string(features.cols()) + " != model width " +
                                            std::to_string(model.weights.rows()));
  }
  return features * model.weights;
}

}  // namespace opu
