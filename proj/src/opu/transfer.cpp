#include "opu/transfer.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "opu/errors.hpp"
#include "opu/ridge.hpp"
#include "opu/rng.hpp"

namespace opu {
namespace {

constexpr std::uint64_t kSplitTag = 0x53504C4954ULL;  // "SPLIT"

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Split shuffle_split(std::size_t samples, double train_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterStream rng(seed, kSplitTag);
  for (std::size_t k = samples; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(samples));
  if (n_train == 0 || n_train >= samples) fail(ErrorCode::kInvalidArgument, "train/test split leaves an empty side");
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(idx[k]));
  return out;
}

double accuracy(const Eigen::MatrixXd& scores, const std::vector<int>& labels, const std::vector<std::size_t>& idx) {
  std::size_t hits = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    Eigen::Index best = 0;
    scores.row(static_cast<Eigen::Index>(k)).maxCoeff(&best);
    hits += static_cast<int>(best) == labels[idx[k]];
  }
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

struct Fit {
  double train_accuracy;
  double test_accuracy;
};

// Centered ridge with trace-relative penalty; one-hot targets.
Fit centered_ridge(const Eigen::MatrixXd& train, const Eigen::MatrixXd& test, const Dataset& data, const Split& split,
                   double lambda_rel, const FeaturePipelineId& pipeline) {
  const Eigen::RowVectorXd mean = train.colwise().mean();
  const Eigen::MatrixXd xtr = train.rowwise() - mean;
  const Eigen::MatrixXd xte = test.rowwise() - mean;
  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(xtr.rows(), data.classes);
  for (std::size_t k = 0; k < split.train.size(); ++k) targets(static_cast<Eigen::Index>(k), data.labels[split.train[k]]) = 1.0;
  const Eigen::RowVectorXd target_mean = targets.colwise().mean();
  targets.rowwise() -= target_mean;

  const double trace = xtr.squaredNorm();
  double lambda = lambda_rel * trace / static_cast<double>(xtr.cols());
  if (lambda == 0.0) lambda = lambda_rel;
  const auto model = fit_ridge(xtr, targets, lambda, pipeline);
  const Eigen::MatrixXd str = predict(model, xtr, pipeline).rowwise() + target_mean;
  const Eigen::MatrixXd ste = predict(model, xte, pipeline).rowwise() + target_mean;
  return {accuracy(str, data.labels, split.train), accuracy(ste, data.labels, split.test)};
}

}  // namespace

TransferReport transfer_pipeline(const Dataset& data, const TransferOptions& options) {
  if (data.features.rows() != static_cast<Eigen::Index>(data.labels.size())) {
    fail(ErrorCode::kDimensionMismatch, "label count does not match sample count");
  }
  const std::set<int> classes(data.labels.begin(), data.labels.end());
  if (classes.size() < 2 || data.classes < 2) fail(ErrorCode::kInvalidArgument, "transfer pipeline needs >= 2 classes");

  const auto split = shuffle_split(data.labels.size(), options.train_fraction, options.split_seed);
  const Eigen::MatrixXd raw_train = gather(data.features, split.train);
  const Eigen::MatrixXd raw_test = gather(data.features, split.test);

  TransferReport report;
  report.train_size = split.train.size();
  report.test_size = split.test.size();
  const auto base = centered_ridge(raw_train, raw_test, data, split, options.lambda_rel, FeaturePipelineId::raw());
  report.baseline_train = base.train_accuracy;
  report.baseline_test = base.test_accuracy;

  EncoderSpec encoder = options.encoder;
  if (encoder.scheme == EncoderScheme::kThresholdPerFeature && !encoder.thresholds) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = raw_train;
    encoder = fit_thresholds({{rm.data(), static_cast<std::size_t>(rm.size())},
                              static_cast<std::size_t>(rm.rows()),
                              static_cast<std::size_t>(rm.cols())});
  }

  DeviceConfig cfg;
  cfg.seed = options.device_seed;
  cfg.input_dim = static_cast<std::size_t>(data.features.cols());
  cfg.output_dim = options.features;
  cfg.mode = Mode::kIntensity;
  cfg.quant_bits = options.quant_bits;
  cfg.storage = options.storage;
  const auto device = Device::build(cfg);
  const FeaturePipelineId pipeline{encoder.describe(), cfg.seed, cfg.input_dim, cfg.output_dim, cfg.mode};

  auto project = [&](const Eigen::MatrixXd& raw) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = raw;
    const auto bits = encode_rows(encoder, {{rm.data(), static_cast<std::size_t>(rm.size())},
                                            static_cast<std::size_t>(rm.rows()),
                                            static_cast<std::size_t>(rm.cols())});
    const auto outputs = device.transform_batch(bits);
    Eigen::MatrixXd features(raw.rows(), static_cast<Eigen::Index>(cfg.output_dim));
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      const auto deq = outputs[k].dequantize();
      features.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::RowVectorXd>(deq.data(), features.cols());
    }
    return features;
  };
  const auto opu = centered_ridge(project(raw_train), project(raw_test), data, split, options.lambda_rel, pipeline);
  report.opu_train = opu.train_accuracy;
  report.opu_test = opu.test_accuracy;
  return report;
}

}  // namespace opu
