#include "opu/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <cmath>
#include <random>
#include <sstream>

#include "opu/datasets.hpp"
#include "opu/dfa.hpp"
#include "opu/encoders.hpp"
#include "opu/errors.hpp"
#include "opu/kernel.hpp"
#include "opu/rng.hpp"
#include "opu/rnla.hpp"
#include "opu/transfer.hpp"
#include "opu/version.hpp"

namespace opu {
namespace {

constexpr std::uint64_t kVectorTag = 0x56454354ULL;  // "VECT"
constexpr std::uint64_t kMatrixTag = 0x4D415452ULL;  // "MATR"

[[noreturn]] void bad_config(const std::string& what) { fail(ErrorCode::kInvalidConfig, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto x = std::stoull(v, &used, 10);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    bad_config(key + ": expected a nonnegative integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    bad_config(key + ": expected a number, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(v)) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  return out;
}

template <typename T>
void require_increasing(const std::string& key, const std::vector<T>& values) {
  if (values.empty()) bad_config(key + ": sweep list is empty");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k - 1] < values[k])) bad_config(key + ": sweep list must be strictly increasing");
  }
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_number(values[k]);
    } else {
      out += std::to_string(values[k]);
    }
  }
  return out;
}

std::vector<double> random_vector(std::uint64_t seed, std::size_t n) {
  CounterStream rng(seed, kVectorTag);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

double relative_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& exact) {
  return (approx - exact).norm() / exact.norm();
}

std::string default_encoder(const std::string& dataset) {
  return dataset == "circles" ? "global:0.5" : "median";
}

// ---------------------------------------------------------------------------

ResultTable run_isometry(const ExperimentConfig& c) {
  ResultTable t({"m", "mean_offdiag_abs", "max_offdiag_abs", "frobenius_residual"});
  for (const auto m : c.m) {
    double mean_off = 0.0;
    double max_off = 0.0;
    double frob = 0.0;
    for (std::size_t trial = 0; trial < c.trials; ++trial) {
      const auto sketch = SketchOperator::gaussian(c.seed + trial, c.n, m);
      Eigen::MatrixXd r = isometry_residual(sketch, c.n);
      frob += r.norm();
      r.diagonal().setZero();
      const auto offdiag = static_cast<double>(c.n * (c.n - 1));
      if (offdiag > 0) mean_off += r.cwiseAbs().sum() / offdiag;
      max_off = std::max(max_off, r.cwiseAbs().maxCoeff());
    }
    const auto trials = static_cast<double>(c.trials);
    t.add_row({static_cast<double>(m), mean_off / trials, max_off, frob / trials});
  }
  return t;
}

Eigen::MatrixXd matvec_operand(const std::string& dataset, std::size_t n, std::uint64_t seed) {
  if (dataset == "identity") return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (dataset == "gaussian") {
    CounterStream rng(seed, kMatrixTag);
    const auto rows = static_cast<Eigen::Index>(std::max<std::size_t>(1, n / 2));
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
    }
    return a;
  }
  bad_config("approx-matvec dataset must be identity or gaussian, got '" + dataset + "'");
}

ResultTable run_approx_matvec(const ExperimentConfig& c) {
  ResultTable t({"ratio", "m", "baseline_rel_error", "opu_rel_error", "opu_rel_error_std"});
  for (const auto m : c.m) {
    double baseline = 0.0;
    std::vector<double> errors;
    for (std::size_t trial = 0; trial < c.trials; ++trial) {
      const std::uint64_t s = c.seed + trial;
      const auto a = matvec_operand(c.dataset, c.n, s);
      const auto xv = random_vector(s, c.n);
      const Eigen::Map<const Eigen::VectorXd> x(xv.data(), static_cast<Eigen::Index>(c.n));
      const Eigen::VectorXd exact = a * x;

      const auto sketch = SketchOperator::gaussian(s, c.n, m);
      const auto pre = precompute_sketch(sketch, a);
      errors.push_back(relative_error(approx_matvec(pre, sketch_vector(sketch, xv)), exact));

      // Baseline: dense double-precision Gaussian from the standard library.
      std::mt19937_64 engine(s);
      std::normal_distribution<double> normal;
      Eigen::MatrixXd g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c.n));
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(engine);
      }
      g /= std::sqrt(static_cast<double>(m));
      const Eigen::VectorXd approx = (g * a.transpose()).transpose() * (g * x);
      baseline += relative_error(approx, exact);
    }
    const auto trials = static_cast<double>(c.trials);
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= trials;
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    const double sd = errors.size() > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
    t.add_row({static_cast<double>(m) / static_cast<double>(c.n), static_cast<double>(m), baseline / trials, mean, sd});
  }
  return t;
}

ResultTable run_rsvd(const ExperimentConfig& c) {
  const auto n = static_cast<Eigen::Index>(c.n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(10, n); ++i) a(i, i) = static_cast<double>(10 - i);
  if (c.dataset == "rotated") {
    CounterStream rng(c.seed, kMatrixTag);
    Eigen::MatrixXd g1(n, n), g2(n, n);
    for (Eigen::Index i = 0; i < n * n; ++i) g1.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < n * n; ++i) g2.data()[i] = rng.normal();
    const Eigen::MatrixXd q1 = Eigen::HouseholderQR<Eigen::MatrixXd>(g1).householderQ();
    const Eigen::MatrixXd q2 = Eigen::HouseholderQR<Eigen::MatrixXd>(g2).householderQ();
    a = q1 * a * q2.transpose();
  } else if (c.dataset != "spectrum") {
    bad_config("rsvd dataset must be spectrum or rotated, got '" + c.dataset + "'");
  }
  RsvdOptions opts{c.rank, c.oversampling, *c.power_iters};
  const auto source = rsvd_test_source(c.seed, c.n, c.rank + c.oversampling);
  const auto result = randomized_svd(a, opts, source);
  const Eigen::VectorXd exact = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();

  ResultTable t({"index", "exact", "randomized", "rel_error"});
  for (Eigen::Index i = 0; i < result.s.size(); ++i) {
    const double rel = exact(i) > 0 ? std::abs(result.s(i) - exact(i)) / exact(i) : std::abs(result.s(i));
    t.add_row({static_cast<double>(i), exact(i), result.s(i), rel});
  }
  const Eigen::MatrixXd recon = result.u * result.s.asDiagonal() * result.v.transpose();
  const auto k = static_cast<Eigen::Index>(c.rank);
  t.set_meta("reconstruction_error", format_number((a - recon).norm()));
  t.set_meta("exact_tail", format_number(exact.tail(exact.size() - k).norm()));
  return t;
}

ResultTable run_kernel(const ExperimentConfig& c) {
  if (c.n < 8) bad_config("kernel experiment needs n >= 8");
  BitVector x(c.n), xo(c.n);
  for (std::size_t j = 0; j < 4; ++j) {
    x.set(j, true);
    xo.set(j + 4, true);
  }
  const BitBatch rows({x, xo});
  ResultTable t({"m", "diag_estimate", "diag_se", "diag_expected", "orth_estimate", "orth_se", "orth_expected"});
  for (const auto m : c.m) {
    double diag = 0.0, diag_se = 0.0, orth = 0.0, orth_se = 0.0;
    for (std::size_t trial = 0; trial < c.trials; ++trial) {
      DeviceConfig cfg;
      cfg.seed = c.seed + trial;
      cfg.input_dim = c.n;
      cfg.output_dim = m;
      const auto est = estimate_kernel(Device::build(cfg), rows);
      diag += est.gram(0, 0);
      diag_se += est.standard_error(0, 0) * est.standard_error(0, 0);
      orth += est.gram(0, 1);
      orth_se += est.standard_error(0, 1) * est.standard_error(0, 1);
    }
    const auto tr = static_cast<double>(c.trials);
    t.add_row({static_cast<double>(m), diag / tr, std::sqrt(diag_se) / tr, analytic_kernel(x, x), orth / tr,
               std::sqrt(orth_se) / tr, analytic_kernel(x, xo)});
  }
  return t;
}

ResultTable run_transfer(const ExperimentConfig& c) {
  const auto data = make_dataset(c.dataset, c.samples, c.n, c.seed);
  ResultTable t({"m", "baseline_train", "baseline_test", "opu_train", "opu_test"});
  for (const auto m : c.m) {
    TransferOptions opts;
    opts.device_seed = c.seed;
    opts.split_seed = c.seed;
    opts.features = m;
    opts.encoder = EncoderSpec::parse(c.encoder);
    opts.lambda_rel = c.lambda;
    const auto r = transfer_pipeline(data, opts);
    t.add_row({static_cast<double>(m), r.baseline_train, r.baseline_test, r.opu_train, r.opu_test});
  }
  return t;
}

ResultTable run_dfa(const ExperimentConfig& c) {
  const auto data = make_dataset(c.dataset, c.samples, c.n, c.seed);
  std::vector<std::size_t> dims{static_cast<std::size_t>(data.features.cols())};
  dims.insert(dims.end(), c.hidden.begin(), c.hidden.end());
  dims.push_back(1);
  auto net = DfaNetwork::create(dims, c.seed, c.seed + 1);
  const Eigen::MatrixXd x = data.features.transpose();
  Eigen::MatrixXd targets(1, x.cols());
  for (Eigen::Index s = 0; s < x.cols(); ++s) targets(0, s) = data.labels[static_cast<std::size_t>(s)] == 1 ? 1.0 : -1.0;
  const auto report = dfa_train(net, x, targets, {c.lr, c.epochs, c.batch});

  std::vector<std::string> cols{"epoch", "loss", "accuracy"};
  for (std::size_t l = 1; l < dims.size(); ++l) cols.push_back("align_" + std::to_string(l));
  ResultTable t(cols);
  for (const auto& r : report.epochs) {
    std::vector<double> row{static_cast<double>(r.epoch), r.loss, r.accuracy};
    row.insert(row.end(), r.alignment.begin(), r.alignment.end());
    t.add_row(std::move(row));
  }
  if (!c.report.empty()) {
    const auto text = report.to_jsonl();
    std::ofstream out(c.report);
    if (!out) fail(ErrorCode::kIo, "cannot write report '" + c.report + "'");
    out << text;
  }
  return t;
}

ResultTable run_throughput(const ExperimentConfig& c) {
  ResultTable t({"n", "m", "batch", "seconds", "transforms_per_second", "effective_op_per_second"});
  for (const auto m : c.m) {
    DeviceConfig cfg;
    cfg.seed = c.seed;
    cfg.input_dim = c.n;
    cfg.output_dim = m;
    const auto device = Device::build(cfg);
    CounterStream rng(c.seed, kVectorTag);
    std::vector<BitVector> rows;
    for (std::size_t k = 0; k < c.batch; ++k) {
      BitVector b(c.n);
      for (std::size_t j = 0; j < c.n; ++j) b.set(j, rng.uniform() < 0.5);
      rows.push_back(std::move(b));
    }
    const BitBatch batch(std::move(rows));
    double seconds = 0.0;
    for (std::size_t trial = 0; trial < c.trials; ++trial) {
      const auto start = std::chrono::steady_clock::now();
      const auto out = device.transform_batch(batch);
      seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (out.size() != batch.rows()) fail(ErrorCode::kInvalidArgument, "batch size changed");
    }
    seconds /= static_cast<double>(c.trials);
    const double tps = static_cast<double>(c.batch) / seconds;
    // One multiply-add (2 ops) per matrix entry per transform.
    const double ops = tps * 2.0 * static_cast<double>(c.n) * static_cast<double>(m);
    t.add_row({static_cast<double>(c.n), static_cast<double>(m), static_cast<double>(c.batch), seconds, tps, ops});
  }
  return t;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kIsometry: return "isometry";
    case Experiment::kApproxMatvec: return "approx-matvec";
    case Experiment::kRsvd: return "rsvd";
    case Experiment::kKernel: return "kernel";
    case Experiment::kTransfer: return "transfer";
    case Experiment::kDfa: return "dfa";
    case Experiment::kThroughput: return "throughput";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (auto e : {Experiment::kIsometry, Experiment::kApproxMatvec, Experiment::kRsvd, Experiment::kKernel,
                 Experiment::kTransfer, Experiment::kDfa, Experiment::kThroughput}) {
    if (to_string(e) == name) return e;
  }
  bad_config("unknown experiment '" + name +
             "' (expected isometry, approx-matvec, rsvd, kernel, transfer, dfa, or throughput)");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    c.experiment = parse_experiment(value);
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
  } else if (key == "n") {
    c.n = parse_u64(key, value);
  } else if (key == "m") {
    c.m = parse_size_list(key, value);
  } else if (key == "ratios") {
    c.ratios.clear();
    for (const auto& item : split_list(value)) c.ratios.push_back(parse_double(key, item));
  } else if (key == "trials") {
    c.trials = parse_u64(key, value);
    if (c.trials == 0) bad_config("trials must be >= 1");
  } else if (key == "dataset") {
    c.dataset = value;
  } else if (key == "encoder") {
    EncoderSpec::parse(value);
    c.encoder = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "samples") {
    c.samples = parse_u64(key, value);
  } else if (key == "epochs") {
    c.epochs = parse_u64(key, value);
  } else if (key == "lr") {
    c.lr = parse_double(key, value);
  } else if (key == "batch") {
    c.batch = parse_u64(key, value);
  } else if (key == "hidden") {
    c.hidden = value.empty() ? std::vector<std::size_t>{} : parse_size_list(key, value);
  } else if (key == "rank") {
    c.rank = parse_u64(key, value);
  } else if (key == "oversampling") {
    c.oversampling = parse_u64(key, value);
  } else if (key == "power_iters") {
    c.power_iters = parse_u64(key, value);
  } else if (key == "lambda") {
    c.lambda = parse_double(key, value);
  } else if (key == "report") {
    c.report = value;
  } else {
    bad_config("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad_config("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig ExperimentConfig::resolve() const {
  ExperimentConfig c = *this;
  auto def = [](auto& field, auto unset, auto value) {
    if (field == unset) field = value;
  };
  switch (c.experiment) {
    case Experiment::kIsometry:
      def(c.n, 0u, 64u);
      if (c.m.empty()) c.m = {256, 1024, 4096};
      def(c.trials, 0u, 10u);
      break;
    case Experiment::kApproxMatvec:
      def(c.n, 0u, 64u);
      if (c.ratios.empty() && c.m.empty()) c.ratios = {0.5, 1, 2, 4, 8};
      def(c.trials, 0u, 20u);
      if (c.dataset.empty()) c.dataset = "identity";
      break;
    case Experiment::kRsvd:
      def(c.n, 0u, 64u);
      def(c.trials, 0u, 1u);
      def(c.rank, 0u, 5u);
      def(c.oversampling, 0u, 5u);
      if (!c.power_iters) c.power_iters = 2;
      if (c.dataset.empty()) c.dataset = "spectrum";
      break;
    case Experiment::kKernel:
      def(c.n, 0u, 16u);
      if (c.m.empty()) c.m = {1024, 2048, 4096, 8192};
      def(c.trials, 0u, 1u);
      break;
    case Experiment::kTransfer:
      if (c.dataset.empty()) c.dataset = "circles";
      def(c.n, 0u, 20u);
      if (c.m.empty()) c.m = {1024};
      def(c.trials, 0u, 1u);
      def(c.samples, 0u, 500u);
      if (c.encoder.empty()) c.encoder = default_encoder(c.dataset);
      if (c.lambda < 0) c.lambda = 0.1;
      break;
    case Experiment::kDfa:
      if (c.dataset.empty()) c.dataset = "moons";
      def(c.n, 0u, 2u);
      def(c.trials, 0u, 1u);
      def(c.samples, 0u, 400u);
      def(c.epochs, 0u, 200u);
      def(c.batch, 0u, 16u);
      if (c.lr < 0) c.lr = 0.01;
      if (c.hidden.empty()) c.hidden = {32, 32};
      break;
    case Experiment::kThroughput:
      def(c.n, 0u, 1024u);
      if (c.m.empty()) c.m = {2048};
      def(c.trials, 0u, 1u);
      def(c.batch, 0u, 256u);
      break;
  }
  if (c.experiment == Experiment::kApproxMatvec && !c.ratios.empty()) {
    require_increasing("ratios", c.ratios);
    c.m.clear();
    for (double r : c.ratios) {
      const double m = r * static_cast<double>(c.n);
      if (!(r > 0) || m < 1 || std::abs(m - std::round(m)) > 1e-9) {
        bad_config("ratio " + format_number(r) + " does not give an integer m for n = " + std::to_string(c.n));
      }
      c.m.push_back(static_cast<std::size_t>(std::llround(m)));
    }
  }
  if (c.n == 0) bad_config("n must be >= 1");
  if (c.trials == 0) bad_config("trials must be >= 1");
  if (c.experiment != Experiment::kRsvd && c.experiment != Experiment::kDfa) {
    require_increasing("m", c.m);
    if (c.m.front() == 0) bad_config("m must be >= 1");
  }
  if (c.experiment == Experiment::kTransfer || c.experiment == Experiment::kDfa) {
    if (c.samples < 4) bad_config("samples must be >= 4");
    if (c.dataset != "blobs" && c.dataset != "circles" && c.dataset != "moons") {
      bad_config("dataset must be blobs, circles, or moons, got '" + c.dataset + "'");
    }
  }
  if (c.experiment == Experiment::kDfa) {
    if (!(c.lr >= 0)) bad_config("lr must be >= 0");
    for (auto h : c.hidden) {
      if (h == 0) bad_config("hidden widths must be positive");
    }
  }
  if (c.experiment == Experiment::kRsvd && c.rank + c.oversampling > c.n) {
    bad_config("rank + oversampling must not exceed n");
  }
  if (c.experiment == Experiment::kRsvd && c.rank == 0) bad_config("rank must be >= 1");
  if (c.experiment == Experiment::kThroughput && c.batch == 0) bad_config("batch must be >= 1");
  return c;
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> e{{"experiment", to_string(experiment)},
                                       {"seed", std::to_string(seed)},
                                       {"n", std::to_string(n)},
                                       {"trials", std::to_string(trials)}};
  if (!m.empty()) e["m"] = join(m);
  if (!ratios.empty()) e["ratios"] = join(ratios);
  if (!dataset.empty()) e["dataset"] = dataset;
  if (!encoder.empty()) e["encoder"] = encoder;
  if (samples) e["samples"] = std::to_string(samples);
  if (epochs) e["epochs"] = std::to_string(epochs);
  if (lr >= 0) e["lr"] = format_number(lr);
  if (batch) e["batch"] = std::to_string(batch);
  if (!hidden.empty()) e["hidden"] = join(hidden);
  if (rank) e["rank"] = std::to_string(rank);
  if (experiment == Experiment::kRsvd) e["oversampling"] = std::to_string(oversampling);
  if (power_iters) e["power_iters"] = std::to_string(*power_iters);
  if (lambda >= 0) e["lambda"] = format_number(lambda);
  return e;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  const auto c = config.resolve();
  const auto start = std::chrono::steady_clock::now();
  ResultTable t;
  switch (c.experiment) {
    case Experiment::kIsometry: t = run_isometry(c); break;
    case Experiment::kApproxMatvec: t = run_approx_matvec(c); break;
    case Experiment::kRsvd: t = run_rsvd(c); break;
    case Experiment::kKernel: t = run_kernel(c); break;
    case Experiment::kTransfer: t = run_transfer(c); break;
    case Experiment::kDfa: t = run_dfa(c); break;
    case Experiment::kThroughput: t = run_throughput(c); break;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ResultTable out(t.columns());
  out.set_meta("tool", std::string("opubench ") + kVersion);
  for (const auto& [k, v] : c.echo()) out.set_meta("config." + k, v);
  for (const auto& [k, v] : t.metadata()) out.set_meta(k, v);
  out.set_meta("wall_clock_seconds", format_number(elapsed));
  for (const auto& row : t.rows()) out.add_row(row);
  return out;
}

std::vector<std::string> summarize(const ResultTable& table) {
  std::vector<std::string> lines;
  for (const auto& row : table.rows()) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += ' ';
      line += table.columns()[c] + "=" + format_number(row[c]);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace opu
