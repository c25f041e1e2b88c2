#include "opu/datasets.hpp"

#include <cmath>
#include <numbers>

#include "opu/errors.hpp"
#include "opu/rng.hpp"

namespace opu {
namespace {

constexpr std::uint64_t kLabelTag = 0x4C4142454C53ULL;  // "LABELS"
constexpr std::uint64_t kPointTag = 0x504F494E5453ULL;  // "POINTS"
constexpr std::uint64_t kNoiseTag = 0x4E4F495345ULL;    // "NOISE"
constexpr std::uint64_t kLiftTag = 0x4C494654ULL;       // "LIFT"

void require_samples(std::size_t samples) {
  if (samples == 0) fail(ErrorCode::kInvalidArgument, "dataset needs at least one sample");
}

}  // namespace

Dataset make_blobs(std::size_t samples, std::size_t dims, std::uint64_t seed, double separation) {
  require_samples(samples);
  if (dims == 0) fail(ErrorCode::kInvalidArgument, "blobs need at least one dimension");
  CounterStream labels(seed, kLabelTag);
  CounterStream noise(seed, kNoiseTag);
  Dataset d{"blobs", Eigen::MatrixXd(samples, dims), std::vector<int>(samples), 2};
  const double offset = separation / std::sqrt(static_cast<double>(dims));
  for (std::size_t s = 0; s < samples; ++s) {
    d.labels[s] = static_cast<int>(labels.below(2));
    const double c = d.labels[s] == 1 ? offset : -offset;
    for (std::size_t k = 0; k < dims; ++k) d.features(s, k) = c + noise.normal();
  }
  return d;
}

Dataset make_circles(std::size_t samples, std::size_t lift_dims, std::uint64_t seed, double noise_level,
                     double factor) {
  require_samples(samples);
  if (lift_dims == 0) fail(ErrorCode::kInvalidArgument, "circles need at least one lifted dimension");
  CounterStream labels(seed, kLabelTag);
  CounterStream points(seed, kPointTag);
  CounterStream noise(seed, kNoiseTag);
  CounterStream lift(seed, kLiftTag);
  Eigen::MatrixXd w(lift_dims, 2);
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    w(k, 0) = lift.normal();
    w(k, 1) = lift.normal();
  }
  Dataset d{"circles", Eigen::MatrixXd(samples, lift_dims), std::vector<int>(samples), 2};
  for (std::size_t s = 0; s < samples; ++s) {
    d.labels[s] = static_cast<int>(labels.below(2));
    const double theta = points.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = d.labels[s] == 1 ? factor : 1.0;
    Eigen::Vector2d p(r * std::cos(theta), r * std::sin(theta));
    p.x() += noise_level * noise.normal();
    p.y() += noise_level * noise.normal();
    d.features.row(static_cast<Eigen::Index>(s)) = (w * p).transpose();
  }
  return d;
}

Dataset make_moons(std::size_t samples, std::uint64_t seed, double noise_level) {
  require_samples(samples);
  CounterStream labels(seed, kLabelTag);
  CounterStream points(seed, kPointTag);
  CounterStream noise(seed, kNoiseTag);
  Dataset d{"moons", Eigen::MatrixXd(samples, 2), std::vector<int>(samples), 2};
  for (std::size_t s = 0; s < samples; ++s) {
    d.labels[s] = static_cast<int>(labels.below(2));
    const double t = points.uniform(0.0, std::numbers::pi);
    double x = std::cos(t);
    double y = std::sin(t);
    if (d.labels[s] == 1) {
      x = 1.0 - x;
      y = 0.5 - y;
    }
    d.features(static_cast<Eigen::Index>(s), 0) = x + noise_level * noise.normal();
    d.features(static_cast<Eigen::Index>(s), 1) = y + noise_level * noise.normal();
  }
  return d;
}

Dataset make_dataset(const std::string& name, std::size_t samples, std::size_t dims, std::uint64_t seed) {
  if (name == "blobs") return make_blobs(samples, dims, seed);
  if (name == "circles") return make_circles(samples, dims, seed);
  if (name == "moons") return make_moons(samples, seed);
  fail(ErrorCode::kInvalidConfig, "unknown dataset '" + name + "' (expected blobs, circles, or moons)");
}

}  // namespace opu
