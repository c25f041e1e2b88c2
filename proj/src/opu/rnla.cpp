#include "opu/rnla.hpp"

#include <cmath>
#include <string>

#include "opu/container.hpp"
#include "opu/errors.hpp"

namespace opu {
namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

void require_finite(const Eigen::MatrixXd& a, const char* what) {
  if (!a.allFinite()) fail(ErrorCode::kNonFinite, std::string(what) + " has non-finite entries");
}

}  // namespace

SketchOperator::SketchOperator(Device device)
    : device_(std::move(device)), normalization_(1.0 / std::sqrt(static_cast<double>(device_.output_dim()))) {
  if (device_.mode() != Mode::kLinear) fail(ErrorCode::kModeMismatch, "sketch operator needs a linear-mode device");
}

SketchOperator SketchOperator::gaussian(std::uint64_t seed, std::size_t n, std::size_t m, Storage storage) {
  DeviceConfig cfg;
  cfg.seed = seed;
  cfg.input_dim = n;
  cfg.output_dim = m;
  cfg.mode = Mode::kLinear;
  cfg.storage = storage;
  return SketchOperator(Device::build(cfg));
}

SketchIdentity SketchOperator::identity() const noexcept {
  return {device_.config().seed, device_.output_dim(), device_.input_dim()};
}

SketchedVector sketch_vector(const SketchOperator& sketch, std::span<const double> x) {
  auto y = sketch.device().transform_linear(x).values;
  for (double& v : y) v *= sketch.normalization();
  return {std::move(y), sketch.identity()};
}

Eigen::MatrixXd isometry_residual(const SketchOperator& sketch, std::size_t probe_dim) {
  if (probe_dim > sketch.input_dim()) {
    fail(ErrorCode::kInvalidArgument, "probe dimension " + std::to_string(probe_dim) + " exceeds n = " +
                                          std::to_string(sketch.input_dim()));
  }
  const auto m = static_cast<Eigen::Index>(sketch.output_dim());
  const auto p = static_cast<Eigen::Index>(probe_dim);
  Eigen::MatrixXd images(m, p);
  std::vector<double> basis(sketch.input_dim(), 0.0);
  for (Eigen::Index a = 0; a < p; ++a) {
    basis[static_cast<std::size_t>(a)] = 1.0;
    const auto s = sketch_vector(sketch, basis);
    images.col(a) = Eigen::Map<const Eigen::VectorXd>(s.values.data(), m);
    basis[static_cast<std::size_t>(a)] = 0.0;
  }
  Eigen::MatrixXd residual = images.transpose() * images;
  residual.diagonal().array() -= 1.0;
  return residual;
}

PrecomputedSketch precompute_sketch(const SketchOperator& sketch, const Eigen::MatrixXd& a) {
  if (static_cast<std::size_t>(a.cols()) != sketch.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "A has " + std::to_string(a.cols()) + " columns, sketch expects n = " +
                                            std::to_string(sketch.input_dim()));
  }
  require_finite(a, "A");
  PrecomputedSketch out;
  out.source_rows = static_cast<std::size_t>(a.rows());
  out.source_cols = static_cast<std::size_t>(a.cols());
  out.identity = sketch.identity();
  out.a_tilde.resize(static_cast<Eigen::Index>(sketch.output_dim()), a.rows());
  std::vector<double> row(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), a.cols()) = a.row(k);
    const auto s = sketch_vector(sketch, row);
    out.a_tilde.col(k) = Eigen::Map<const Eigen::VectorXd>(s.values.data(), out.a_tilde.rows());
  }
  return out;
}

Eigen::VectorXd approx_matvec(const PrecomputedSketch& sketch, const SketchedVector& x_tilde) {
  if (!(x_tilde.identity == sketch.identity)) {
    fail(ErrorCode::kIdentityMismatch, "sketched vector was produced by a different sketch operator");
  }
  if (static_cast<Eigen::Index>(x_tilde.values.size()) != sketch.a_tilde.rows()) {
    fail(ErrorCode::kDimensionMismatch, "sketched vector has length " + std::to_string(x_tilde.values.size()) +
                                            ", expected m = " + std::to_string(sketch.a_tilde.rows()));
  }
  const Eigen::Map<const Eigen::VectorXd> x(x_tilde.values.data(), sketch.a_tilde.rows());
  return sketch.a_tilde.transpose() * x;
}

std::vector<std::uint8_t> serialize_sketch(const PrecomputedSketch& sketch) {
  ByteWriter w;
  w.header({kContainerVersion, Mode::kLinear, sketch.identity.n, sketch.identity.m, sketch.identity.seed});
  w.bytes("SKCH");
  w.u64(sketch.source_rows);
  w.u64(sketch.source_cols);
  for (Eigen::Index i = 0; i < sketch.a_tilde.rows(); ++i) {
    for (Eigen::Index k = 0; k < sketch.a_tilde.cols(); ++k) w.f64(sketch.a_tilde(i, k));
  }
  return w.take();
}

PrecomputedSketch parse_sketch(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto h = r.header();
  if (h.mode != Mode::kLinear) throw ParseError(ErrorCode::kFormat, 6, "sketch container must be linear mode");
  r.expect_tag("SKCH", "section tag");
  PrecomputedSketch out;
  out.identity = {h.seed, h.m, h.n};
  const auto dims_at = r.offset();
  out.source_rows = r.u64();
  out.source_cols = r.u64();
  if (out.source_cols != h.n) {
    throw ParseError(ErrorCode::kFormat, dims_at + 8, "source column count does not match sketch n");
  }
  const long double expected = static_cast<long double>(h.m) * out.source_rows * 8;
  if (expected != static_cast<long double>(r.remaining())) {
    throw ParseError(ErrorCode::kFormat, r.offset(), "sketch payload size does not match header");
  }
  out.a_tilde.resize(static_cast<Eigen::Index>(h.m), static_cast<Eigen::Index>(out.source_rows));
  for (Eigen::Index i = 0; i < out.a_tilde.rows(); ++i) {
    for (Eigen::Index k = 0; k < out.a_tilde.cols(); ++k) out.a_tilde(i, k) = r.f64();
  }
  return out;
}

void save_sketch(const PrecomputedSketch& sketch, const std::filesystem::path& path) {
  const auto bytes = serialize_sketch(sketch);
  write_file(path, bytes);
}

PrecomputedSketch load_sketch(const std::filesystem::path& path, const SketchIdentity& expected) {
  auto sketch = parse_sketch(read_file(path));
  if (!(sketch.identity == expected)) {
    fail(ErrorCode::kIdentityMismatch,
         "stored sketch (seed " + std::to_string(sketch.identity.seed) + ", m " + std::to_string(sketch.identity.m) +
             ", n " + std::to_string(sketch.identity.n) + ") does not match the operator in use");
  }
  return sketch;
}

SketchOperator rsvd_test_source(std::uint64_t seed, std::size_t cols, std::size_t samples) {
  return SketchOperator::gaussian(seed, samples, cols);
}

SvdResult randomized_svd(const Eigen::MatrixXd& a, const RsvdOptions& options, const SketchOperator& test_source) {
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  const std::size_t samples = options.rank + options.oversampling;
  if (options.rank == 0) fail(ErrorCode::kInvalidArgument, "rank must be positive");
  if (samples > std::min(rows, cols)) {
    fail(ErrorCode::kInvalidArgument, "rank + oversampling = " + std::to_string(samples) + " exceeds min(r, n) = " +
                                          std::to_string(std::min(rows, cols)));
  }
  require_finite(a, "A");
  if (test_source.output_dim() != cols || test_source.input_dim() < samples) {
    fail(ErrorCode::kDimensionMismatch, "test source must map at least " + std::to_string(samples) +
                                            " basis vectors into R^" + std::to_string(cols));
  }

  // Ω: columns are the sketched images of the first `samples` basis vectors.
  const auto l = static_cast<Eigen::Index>(samples);
  Eigen::MatrixXd omega(a.cols(), l);
  std::vector<double> basis(test_source.input_dim(), 0.0);
  for (Eigen::Index j = 0; j < l; ++j) {
    basis[static_cast<std::size_t>(j)] = 1.0;
    const auto s = sketch_vector(test_source, basis);
    omega.col(j) = Eigen::Map<const Eigen::VectorXd>(s.values.data(), a.cols());
    basis[static_cast<std::size_t>(j)] = 0.0;
  }

  Eigen::MatrixXd q = orthonormalize(a * omega);
  for (std::size_t it = 0; it < options.power_iters; ++it) {
    const Eigen::MatrixXd z = orthonormalize(a.transpose() * q);
    q = orthonormalize(a * z);
  }

  const Eigen::MatrixXd b = q.transpose() * a;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto k = static_cast<Eigen::Index>(options.rank);
  return {q * svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
}

}  // namespace opu
