#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "opu/datasets.hpp"
#include "opu/dfa.hpp"
#include "opu/errors.hpp"
#include "opu/kernel.hpp"
#include "opu/ridge.hpp"
#include "opu/rng.hpp"
#include "opu/transfer.hpp"

using namespace opu;

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  CounterStream rng(seed, 0x3117);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
  }
  return a;
}

// Gaussian elimination with partial pivoting on (ΦᵀΦ + λI) W = ΦᵀT.
Eigen::MatrixXd normal_equations(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& t, double lambda) {
  const auto d = phi.cols();
  const auto k = t.cols();
  std::vector<std::vector<double>> aug(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d + k)));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double s = (i == j) ? lambda : 0.0;
      for (Eigen::Index r = 0; r < phi.rows(); ++r) s += phi(r, i) * phi(r, j);
      aug[i][j] = s;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < phi.rows(); ++r) s += phi(r, i) * t(r, c);
      aug[i][d + c] = s;
    }
  }
  for (Eigen::Index col = 0; col < d; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < d; ++r) {
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    }
    std::swap(aug[col], aug[pivot]);
    for (Eigen::Index r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = aug[r][col] / aug[col][col];
      for (Eigen::Index c = col; c < d + k; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  Eigen::MatrixXd w(d, k);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) w(i, c) = aug[i][d + c] / aug[i][i];
  }
  return w;
}

BitVector ones_at(std::size_t n, std::initializer_list<std::size_t> idx) {
  BitVector b(n);
  for (auto j : idx) b.set(j, true);
  return b;
}

DeviceConfig intensity(std::uint64_t seed, std::size_t n, std::size_t m) {
  DeviceConfig c;
  c.seed = seed;
  c.input_dim = n;
  c.output_dim = m;
  return c;
}

double cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum() / (a.norm() * b.norm());
}

}  // namespace

TEST_CASE("ridge on identity features") {
  const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd t = gaussian_matrix(4, 2, 1);
  CHECK((fit_ridge(phi, t, 0.0).weights - t).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((fit_ridge(phi, t, 1.0).weights - t / 2).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("ridge matches the normal-equations oracle") {
  const Eigen::MatrixXd phi = gaussian_matrix(50, 10, 2);
  const Eigen::MatrixXd t = gaussian_matrix(50, 3, 3);
  for (double lambda : {0.0, 0.5, 10.0}) {
    const auto model = fit_ridge(phi, t, lambda);
    CHECK((model.weights - normal_equations(phi, t, lambda)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(model.lambda == lambda);
  }
}

TEST_CASE("ridge errors") {
  Eigen::MatrixXd phi = gaussian_matrix(20, 4, 4);
  phi.col(3) = phi.col(1);
  const Eigen::MatrixXd t = gaussian_matrix(20, 1, 5);
  try {
    fit_ridge(phi, t, 0.0);
    FAIL("expected singular system");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingular);
  }
  CHECK_NOTHROW(fit_ridge(phi, t, 1e-3));
  CHECK_THROWS_AS(fit_ridge(phi, t, -1.0), Error);
  CHECK_THROWS_AS(fit_ridge(phi, gaussian_matrix(19, 1, 5), 1.0), Error);

  FeaturePipelineId trained{"median", 7, 4, 64, Mode::kIntensity};
  const auto model = fit_ridge(gaussian_matrix(20, 4, 6), t, 1.0, trained);
  CHECK(predict(model, gaussian_matrix(3, 4, 7), trained).rows() == 3);
  auto other = trained;
  other.seed = 8;
  try {
    predict(model, gaussian_matrix(3, 4, 7), other);
    FAIL("expected identity mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIdentityMismatch);
  }
}

TEST_CASE("analytic kernel") {
  const auto a = ones_at(16, {0, 1, 2, 3});
  const auto b = ones_at(16, {4, 5, 6, 7});
  const auto c = ones_at(16, {2, 3, 4, 5});
  CHECK(analytic_kernel(a, a) == 32.0);
  CHECK(analytic_kernel(a, b) == 16.0);
  CHECK(analytic_kernel(a, c) == 20.0);
}

TEST_CASE("kernel estimate structure") {
  const auto device = Device::build(intensity(3, 16, 512));
  const BitBatch rows({ones_at(16, {0, 1}), BitVector(16), ones_at(16, {1, 5, 9}), ones_at(16, {0, 1})});
  const auto est = estimate_kernel(device, rows);
  CHECK(est.gram.rows() == 4);
  CHECK((est.gram - est.gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(est.gram.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(est.gram(0, 0) == est.gram(3, 3));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.gram);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-9 * eig.eigenvalues().maxCoeff());
  CHECK((est.standard_error.array() >= 0.0).all());
}

TEST_CASE("kernel estimate converges to the analytic value") {
  const auto a = ones_at(16, {0, 1, 2, 3});
  const auto b = ones_at(16, {8, 9, 10, 11});
  double prev = INFINITY;
  for (std::size_t m : {256u, 2048u, 16384u}) {
    double err = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto est = estimate_kernel(Device::build(intensity(700 + s, 16, m)), BitBatch({a, b}));
      err += std::abs(est.gram(0, 0) - 32.0) + std::abs(est.gram(0, 1) - 16.0);
    }
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("datasets are seeded and shaped") {
  const auto c1 = make_circles(100, 20, 5);
  const auto c2 = make_circles(100, 20, 5);
  CHECK(c1.features == c2.features);
  CHECK(c1.labels == c2.labels);
  CHECK(c1.features.cols() == 20);
  CHECK(make_circles(100, 20, 6).features != c1.features);
  const auto moons = make_moons(50, 1);
  CHECK(moons.features.rows() == 50);
  CHECK(moons.features.cols() == 2);
  for (int y : moons.labels) CHECK((y == 0 || y == 1));
  CHECK_THROWS_AS(make_dataset("spirals", 10, 2, 1), Error);
}

TEST_CASE("transfer pipeline on circles and blobs") {
  TransferOptions opt;
  opt.device_seed = 42;
  opt.encoder = EncoderSpec::parse("global:0.5");
  opt.split_seed = 42;
  const auto circles = make_circles(500, 20, 42);
  const auto wide = transfer_pipeline(circles, opt);
  CHECK(wide.train_size + wide.test_size == 500);
  CHECK(wide.opu_test >= wide.baseline_test + 0.15);

  opt.features = 2;
  const auto narrow = transfer_pipeline(circles, opt);
  CHECK(narrow.opu_test >= narrow.baseline_test - 0.05);
  CHECK(narrow.opu_test <= wide.opu_test);

  TransferOptions blob_opt;
  blob_opt.device_seed = 42;
  blob_opt.split_seed = 42;
  const auto blobs = transfer_pipeline(make_blobs(500, 20, 42), blob_opt);
  CHECK(blobs.baseline_test >= 0.98);
  CHECK(blobs.opu_test >= 0.98);
}

TEST_CASE("single-layer DFA equals backprop") {
  auto net = DfaNetwork::create({3, 2}, 1, 2);
  const Eigen::MatrixXd x = gaussian_matrix(3, 10, 8);
  const Eigen::MatrixXd t = gaussian_matrix(2, 10, 9);
  const auto g_dfa = net.dfa(x, t);
  const auto g_bp = net.backprop(x, t);
  CHECK(g_dfa.weights[0] == g_bp.weights[0]);
  CHECK(g_dfa.biases[0] == g_bp.biases[0]);
  CHECK(cosine(g_dfa.weights[0], g_bp.weights[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("output-layer DFA gradient is the true gradient") {
  auto net = DfaNetwork::create({2, 8, 3}, 3, 4);
  const Eigen::MatrixXd x = gaussian_matrix(2, 6, 10);
  const Eigen::MatrixXd t = gaussian_matrix(3, 6, 11);
  const auto g_dfa = net.dfa(x, t);
  const auto g_bp = net.backprop(x, t);
  CHECK((g_dfa.weights.back() - g_bp.weights.back()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(g_dfa.weights[0].rows() == 8);
}

TEST_CASE("backprop matches finite differences") {
  auto net = DfaNetwork::create({2, 1, 1}, 5, 6);
  const Eigen::MatrixXd x = gaussian_matrix(2, 4, 12);
  const Eigen::MatrixXd t = gaussian_matrix(1, 4, 13);
  const auto grad = net.backprop(x, t);
  const double h = 1e-6;
  auto check_param = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = net.loss(x, t);
    param = saved - h;
    const double down = net.loss(x, t);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    CHECK(std::abs(numeric - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
  };
  int params = 0;
  for (std::size_t l = 0; l < net.layers(); ++l) {
    for (Eigen::Index i = 0; i < net.weights[l].size(); ++i, ++params) check_param(net.weights[l].data()[i], grad.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i, ++params) check_param(net.biases[l](i), grad.biases[l](i));
  }
  CHECK(params == 5);
}

TEST_CASE("DFA training invariants") {
  const auto data = make_moons(64, 3);
  const Eigen::MatrixXd x = data.features.transpose();
  Eigen::MatrixXd t(1, x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) t(0, k) = data.labels[static_cast<std::size_t>(k)] ? 1.0 : -1.0;

  SUBCASE("zero learning rate is a no-op") {
    auto net = DfaNetwork::create({2, 8, 8, 1}, 1, 2);
    const auto before = net.weights;
    const auto report = dfa_train(net, x, t, {0.0, 3, 16});
    CHECK(net.weights == before);
    CHECK(report.epochs.size() == 3);
    CHECK(report.epochs[0].loss == report.epochs[2].loss);
  }
  SUBCASE("feedback matrices are fixed") {
    auto net = DfaNetwork::create({2, 8, 8, 1}, 1, 2);
    const auto feedback = net.feedback();
    REQUIRE(feedback.size() == 2);
    CHECK(feedback[0].rows() == 8);
    CHECK(feedback[0].cols() == 1);
    dfa_train(net, x, t, {0.01, 5, 16});
    CHECK(net.feedback() == feedback);
  }
  SUBCASE("divergence is reported") {
    auto net = DfaNetwork::create({2, 8, 1}, 1, 2);
    try {
      dfa_train(net, x, 1e200 * t, {1.0, 5, 16});
      FAIL("expected divergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDivergence);
    }
  }
  SUBCASE("jsonl report") {
    auto net = DfaNetwork::create({2, 4, 1}, 1, 2);
    const auto report = dfa_train(net, x, t, {0.01, 2, 16});
    const auto text = report.to_jsonl();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("\"alignment\"") != std::string::npos);
  }
}

TEST_CASE("DFA learns two moons") {
  const auto data = make_moons(400, 42);
  const Eigen::MatrixXd x = data.features.transpose();
  Eigen::MatrixXd t(1, x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) t(0, k) = data.labels[static_cast<std::size_t>(k)] ? 1.0 : -1.0;
  auto net = DfaNetwork::create({2, 32, 32, 1}, 42, 43);
  const auto report = dfa_train(net, x, t, {});
  CHECK(report.epochs.back().accuracy >= 0.95);
  CHECK(report.epochs.back().loss < report.epochs.front().loss);
  CHECK(report.epochs.back().alignment[0] > 0.0);
  CHECK(classification_accuracy(net.forward(x), t) == report.epochs.back().accuracy);
}
