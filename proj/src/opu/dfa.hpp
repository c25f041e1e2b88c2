#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace opu {

// Fully connected network trained by Direct Feedback Alignment: tanh hidden
// layers, identity output, squared loss. Samples are columns.
class DfaNetwork {
 public:
  // dims = (d0, ..., dL), L >= 1. Weights use Glorot-uniform init from
  // init_seed; feedback matrix B_l (d_l x d_L) has entries N(0, 1/d_L) drawn
  // from a linear-mode device seeded from feedback_seed and l.
  static DfaNetwork create(std::vector<std::size_t> dims, std::uint64_t init_seed, std::uint64_t feedback_seed);

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t layers() const noexcept { return weights.size(); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  // (1 / 2N) Σ ‖ŷ - t‖²
  double loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) const;
  // Exact loss gradient (reference backprop, diagnostics only).
  Gradients backprop(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) const;
  // DFA descent direction: hidden deltas are (B_l e) ⊙ tanh'(a_l); the output
  // layer uses its true local gradient.
  Gradients dfa(const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) const;

  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  const std::vector<Eigen::MatrixXd>& feedback() const noexcept { return feedback_; }

 private:
  struct Trace {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activations
    Eigen::MatrixXd output;
  };
  Trace run(const Eigen::MatrixXd& x) const;
  Gradients assemble(const Trace& trace, const std::vector<Eigen::MatrixXd>& deltas) const;

  std::vector<std::size_t> dims_;
  std::vector<Eigen::MatrixXd> feedback_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<double> alignment;  // per weight layer, mean cosine over the epoch's steps
};

struct TrainingReport {
  std::vector<EpochRecord> epochs;
  // One JSON object per line: {"epoch", "loss", "accuracy", "alignment": [...]}.
  std::string to_jsonl() const;
};

struct DfaOptions {
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
};

// Sign accuracy for one output, argmax otherwise.
double classification_accuracy(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets);

// Mini-batches are taken in sample order. Throws kDivergence on a
// non-finite loss.
TrainingReport dfa_train(DfaNetwork& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets,
                         const DfaOptions& options);

}  // namespace opu
