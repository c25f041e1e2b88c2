#include "opu/dfa.hpp"

#include <cmath>
#include <string>

#include "json.hpp"

#include "opu/device.hpp"
#include "opu/errors.hpp"
#include "opu/rng.hpp"

namespace opu {
namespace {

constexpr std::uint64_t kInitTag = 0x57494E4954ULL;  // "WINIT"

double cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
  return a.cwiseProduct(b).sum() / (na * nb);
}

}  // namespace

DfaNetwork DfaNetwork::create(std::vector<std::size_t> dims, std::uint64_t init_seed, std::uint64_t feedback_seed) {
  if (dims.size() < 2) fail(ErrorCode::kInvalidArgument, "network needs at least input and output dims");
  for (auto d : dims) {
    if (d == 0) fail(ErrorCode::kInvalidArgument, "layer width must be positive");
  }
  DfaNetwork net;
  net.dims_ = std::move(dims);
  const std::size_t layers = net.dims_.size() - 1;
  CounterStream init(init_seed, kInitTag);
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(net.dims_[l]);
    const auto out = static_cast<Eigen::Index>(net.dims_[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index i = 0; i < out; ++i) {
      for (Eigen::Index j = 0; j < in; ++j) w(i, j) = init.uniform(-limit, limit);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  const std::size_t top = net.dims_.back();
  const double scale = 1.0 / std::sqrt(static_cast<double>(top));
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    DeviceConfig cfg;
    cfg.seed = derive_key(feedback_seed, l + 1);
    cfg.input_dim = top;
    cfg.output_dim = net.dims_[l + 1];
    cfg.mode = Mode::kLinear;
    cfg.storage = Storage::kOnTheFly;
    const auto device = Device::build(cfg);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(cfg.output_dim), static_cast<Eigen::Index>(top));
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        b(i, j) = scale * device.entry_re(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
    net.feedback_.push_back(std::move(b));
  }
  return net;
}

DfaNetwork::Trace DfaNetwork::run(const Eigen::MatrixXd& x) const {
  if (x.rows() != static_cast<Eigen::Index>(dims_.front())) {
    fail(ErrorCode::kDimensionMismatch, "input has " + std::to_string(x.rows()) + " features, network expects " +
                                            std::to_string(dims_.front()));
  }
  Trace t;
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    t.inputs.push_back(h);
    Eigen::MatrixXd a = (weights[l] * h).colwise() + biases[l];
    h = l + 1 < weights.size() ? Eigen::MatrixXd(a.array().tanh()) : a;
    t.pre.push_back(std::move(a));
  }
  t.output = std::move(h);
  return t;
}

Eigen::MatrixXd DfaNetwork::forward(const Eigen::MatrixXd& x) const { return run(x).output; }

double DfaNetwork::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) const {
  return 0.5 * (forward(x) - targets).squaredNorm() / static_cast<double>(x.cols());
}

DfaNetwork::Gradients DfaNetwork::assemble(const Trace& trace, const std::vector<Eigen::MatrixXd>& deltas) const {
  const double inv = 1.0 / static_cast<double>(trace.output.cols());
  Gradients g;
  for (std::size_t l = 0; l < deltas.size(); ++l) {
    g.weights.push_back(inv * deltas[l] * trace.inputs[l].transpose());
    g.biases.push_back(inv * deltas[l].rowwise().sum());
  }
  return g;
}

DfaNetwork::Gradients DfaNetwork::backprop(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) const {
  const auto trace = run(x);
  std::vector<Eigen::MatrixXd> deltas(weights.size());
  deltas.back() = trace.output - targets;
  for (std::size_t l = weights.size() - 1; l-- > 0;) {
    const Eigen::ArrayXXd slope = 1.0 - trace.pre[l].array().tanh().square();
    deltas[l] = (weights[l + 1].transpose() * deltas[l + 1]).array() * slope;
  }
  return assemble(trace, deltas);
}

DfaNetwork::Gradients DfaNetwork::dfa(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) const {
  const auto trace = run(x);
  const Eigen::MatrixXd e = trace.output - targets;
  std::vector<Eigen::MatrixXd> deltas(weights.size());
  deltas.back() = e;
  for (std::size_t l = 0; l + 1 < weights.size(); ++l) {
    const Eigen::ArrayXXd slope = 1.0 - trace.pre[l].array().tanh().square();
    deltas[l] = (feedback_[l] * e).array() * slope;
  }
  return assemble(trace, deltas);
}

std::string TrainingReport::to_jsonl() const {
  std::string out;
  for (const auto& r : epochs) {
    nlohmann::json j = {{"epoch", r.epoch}, {"loss", r.loss}, {"accuracy", r.accuracy}, {"alignment", r.alignment}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

double classification_accuracy(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) {
  std::size_t hits = 0;
  for (Eigen::Index s = 0; s < outputs.cols(); ++s) {
    if (outputs.rows() == 1) {
      hits += (outputs(0, s) >= 0.0) == (targets(0, s) >= 0.0);
    } else {
      Eigen::Index a = 0;
      Eigen::Index b = 0;
      outputs.col(s).maxCoeff(&a);
      targets.col(s).maxCoeff(&b);
      hits += a == b;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(outputs.cols());
}

TrainingReport dfa_train(DfaNetwork& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets,
                         const DfaOptions& options) {
  if (!(options.learning_rate >= 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be nonnegative");
  if (options.batch_size == 0) fail(ErrorCode::kInvalidArgument, "batch size must be positive");
  if (x.cols() != targets.cols() || targets.rows() != static_cast<Eigen::Index>(net.dims().back())) {
    fail(ErrorCode::kDimensionMismatch, "targets do not match data or output width");
  }
  if (x.cols() == 0) fail(ErrorCode::kInvalidArgument, "no training samples");

  TrainingReport report;
  const auto samples = static_cast<std::size_t>(x.cols());
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::vector<double> align(net.layers(), 0.0);
    std::size_t steps = 0;
    for (std::size_t start = 0; start < samples; start += options.batch_size) {
      const auto width = static_cast<Eigen::Index>(std::min(options.batch_size, samples - start));
      const auto xb = x.middleCols(static_cast<Eigen::Index>(start), width);
      const auto tb = targets.middleCols(static_cast<Eigen::Index>(start), width);
      const auto update = net.dfa(xb, tb);
      const auto reference = net.backprop(xb, tb);
      for (std::size_t l = 0; l < net.layers(); ++l) {
        align[l] += cosine(update.weights[l], reference.weights[l]);
        net.weights[l] -= options.learning_rate * update.weights[l];
        net.biases[l] -= options.learning_rate * update.biases[l];
      }
      ++steps;
    }
    const Eigen::MatrixXd out = net.forward(x);
    const double loss = 0.5 * (out - targets).squaredNorm() / static_cast<double>(samples);
    if (!std::isfinite(loss)) {
      fail(ErrorCode::kDivergence, "DFA training diverged at epoch " + std::to_string(epoch) +
                                       " (loss is not finite); lower the learning rate");
    }
    for (auto& a : align) a /= static_cast<double>(steps);
    report.epochs.push_back({epoch, loss, classification_accuracy(out, targets), std::move(align)});
  }
  return report;
}

}  // namespace opu
