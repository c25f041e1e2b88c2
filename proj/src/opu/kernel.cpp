#include "opu/kernel.hpp"

#include <bit>
#include <cmath>

#include "opu/errors.hpp"

namespace opu {

KernelEstimate estimate_kernel(const Device& device, const BitBatch& rows) {
  if (device.mode() != Mode::kIntensity) fail(ErrorCode::kModeMismatch, "kernel estimation needs an intensity device");
  const auto outputs = device.transform_batch(rows);
  const auto p = static_cast<Eigen::Index>(rows.rows());
  const auto m = static_cast<Eigen::Index>(device.output_dim());
  Eigen::MatrixXd y(m, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    const auto deq = outputs[static_cast<std::size_t>(a)].dequantize();
    y.col(a) = Eigen::Map<const Eigen::VectorXd>(deq.data(), m);
  }
  KernelEstimate est;
  est.gram = (y.transpose() * y) / static_cast<double>(m);
  est.standard_error = Eigen::MatrixXd::Zero(p, p);
  if (m > 1) {
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = a; b < p; ++b) {
        const Eigen::ArrayXd prod = y.col(a).array() * y.col(b).array();
        const double var = (prod - est.gram(a, b)).square().sum() / static_cast<double>(m - 1);
        est.standard_error(a, b) = est.standard_error(b, a) = std::sqrt(var / static_cast<double>(m));
      }
    }
  }
  return est;
}

double analytic_kernel(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) fail(ErrorCode::kDimensionMismatch, "kernel arguments differ in length");
  std::size_t overlap = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) overlap += std::popcount(a.words()[w] & b.words()[w]);
  const auto na = static_cast<double>(a.popcount());
  const auto nb = static_cast<double>(b.popcount());
  const auto ov = static_cast<double>(overlap);
  return na * nb + ov * ov;
}

}  // namespace opu
