#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "opu/device.hpp"

namespace opu {

struct SketchIdentity {
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::size_t n = 0;

  friend bool operator==(const SketchIdentity&, const SketchIdentity&) = default;
};

// Sketched vector tagged with the operator that produced it.
struct SketchedVector {
  std::vector<double> values;
  SketchIdentity identity;
};

// S = M / sqrt(m) on top of a linear-mode device, so that E[SᵀS] = I.
class SketchOperator {
 public:
  explicit SketchOperator(Device device);
  static SketchOperator gaussian(std::uint64_t seed, std::size_t n, std::size_t m,
                                 Storage storage = Storage::kCached);

  std::size_t input_dim() const noexcept { return device_.input_dim(); }
  std::size_t output_dim() const noexcept { return device_.output_dim(); }
  double normalization() const noexcept { return normalization_; }
  SketchIdentity identity() const noexcept;
  const Device& device() const noexcept { return device_; }

 private:
  Device device_;
  double normalization_;
};

SketchedVector sketch_vector(const SketchOperator& sketch, std::span<const double> x);

// G - I where G_ab is the inner product of the sketches of e_a and e_b, a, b < p.
Eigen::MatrixXd isometry_residual(const SketchOperator& sketch, std::size_t probe_dim);

// Ã = S·Aᵀ (m x r), the compressed form of a fixed r x n matrix A.
struct PrecomputedSketch {
  Eigen::MatrixXd a_tilde;
  std::size_t source_rows = 0;  // r
  std::size_t source_cols = 0;  // n
  SketchIdentity identity;
};

PrecomputedSketch precompute_sketch(const SketchOperator& sketch, const Eigen::MatrixXd& a);

// Ãᵀ·x̃ = A·SᵀS·x ≈ A·x, in O(m·r).
Eigen::VectorXd approx_matvec(const PrecomputedSketch& sketch, const SketchedVector& x_tilde);

std::vector<std::uint8_t> serialize_sketch(const PrecomputedSketch& sketch);
PrecomputedSketch parse_sketch(std::span<const std::uint8_t> bytes);
void save_sketch(const PrecomputedSketch& sketch, const std::filesystem::path& path);
// Throws kIdentityMismatch if the stored identity differs from `expected`.
PrecomputedSketch load_sketch(const std::filesystem::path& path, const SketchIdentity& expected);

struct SvdResult {
  Eigen::MatrixXd u;  // r x k
  Eigen::VectorXd s;  // k, nonincreasing
  Eigen::MatrixXd v;  // n x k
};

struct RsvdOptions {
  std::size_t rank = 1;
  std::size_t oversampling = 10;
  std::size_t power_iters = 2;
};

// Test matrix source for randomized_svd on matrices with `cols` columns:
// a linear device whose first `samples` sketched basis images form Ω.
SketchOperator rsvd_test_source(std::uint64_t seed, std::size_t cols, std::size_t samples);

// Sketch, orthonormalize, project, and take a small exact SVD. Power
// iterations re-orthonormalize after every product.
SvdResult randomized_svd(const Eigen::MatrixXd& a, const RsvdOptions& options, const SketchOperator& test_source);

}  // namespace opu
