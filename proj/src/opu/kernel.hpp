#pragma once

#include <Eigen/Dense>

#include "opu/bits.hpp"
#include "opu/device.hpp"

namespace opu {

struct KernelEstimate {
  Eigen::MatrixXd gram;            // (1/m) Σ_i y_a[i] y_b[i] on dequantized outputs
  Eigen::MatrixXd standard_error;  // Monte-Carlo standard error of each entry
};

KernelEstimate estimate_kernel(const Device& device, const BitBatch& rows);

// Limit of the estimate for unit-second-moment complex Gaussian projections:
// ‖a‖²‖b‖² + ⟨a, b⟩².
double analytic_kernel(const BitVector& a, const BitVector& b);

}  // namespace opu
