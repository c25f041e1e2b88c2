#include <string>

#include "doctest.h"
#include "opu/errors.hpp"
#include "opu/experiment.hpp"
#include "opu/result_table.hpp"

using namespace opu;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an opu::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("result table csv round-trip") {
  ResultTable t({"m", "err"});
  t.add_row({256, 0.125});
  t.add_row({1024, 1.0 / 3.0});
  t.set_meta("tool", "opubench");
  t.set_meta("wall_clock_seconds", "0.5");
  const auto csv = t.to_csv();
  CHECK(csv.rfind("# tool: opubench\n", 0) == 0);
  CHECK(csv.find("m,err\n256,0.125\n") != std::string::npos);
  CHECK(t.payload().find("wall_clock") == std::string::npos);

  const auto back = ResultTable::parse_csv(csv);
  CHECK(back.columns() == t.columns());
  CHECK(back.column("m") == std::vector<double>{256, 1024});
  CHECK(back.column("err")[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  REQUIRE(back.meta("tool") != nullptr);
  CHECK(*back.meta("tool") == "opubench");
  CHECK(back.meta("missing") == nullptr);
  CHECK_THROWS_AS(t.add_row({1}), Error);
  CHECK_THROWS_AS(t.column("nope"), Error);
  CHECK(t.gnuplot_script("out.csv").find("out.csv") != std::string::npos);
}

TEST_CASE("config parsing") {
  const auto c = parse_config_text("# sweep\nexperiment = isometry\nseed = 7\nm = 16, 32\ntrials=2\n");
  CHECK(c.experiment == Experiment::kIsometry);
  CHECK(c.seed == 7);
  CHECK(c.m == std::vector<std::size_t>{16, 32});
  CHECK(c.trials == 2);

  CHECK(code_of([] { parse_config_text("bogus = 1"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { parse_config_text("seed = x"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { parse_config_text("no equals sign"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { parse_experiment("svd"); }) == ErrorCode::kInvalidConfig);
  for (auto e : {Experiment::kIsometry, Experiment::kApproxMatvec, Experiment::kRsvd, Experiment::kKernel,
                 Experiment::kTransfer, Experiment::kDfa, Experiment::kThroughput}) {
    CHECK(parse_experiment(to_string(e)) == e);
  }
}

TEST_CASE("resolve fills defaults and rejects bad sweeps") {
  ExperimentConfig c;
  c.experiment = Experiment::kIsometry;
  const auto r = c.resolve();
  CHECK(r.n == 64);
  CHECK(r.m == std::vector<std::size_t>{256, 1024, 4096});
  CHECK(r.trials == 10);
  CHECK(r.echo().at("seed") == "42");

  c.m = {1024, 256};
  CHECK(code_of([&] { c.resolve(); }) == ErrorCode::kInvalidConfig);
  c.m = {0};
  CHECK(code_of([&] { c.resolve(); }) == ErrorCode::kInvalidConfig);

  ExperimentConfig t;
  t.experiment = Experiment::kTransfer;
  t.dataset = "mnist";
  CHECK(code_of([&] { t.resolve(); }) == ErrorCode::kInvalidConfig);
  t.dataset = "circles";
  CHECK(t.resolve().encoder == "global:0.5");
  t.dataset = "blobs";
  CHECK(t.resolve().encoder == "median");

  ExperimentConfig s;
  s.experiment = Experiment::kRsvd;
  s.n = 8;
  s.rank = 5;
  s.oversampling = 5;
  CHECK(code_of([&] { s.resolve(); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("experiments are deterministic apart from wall clock") {
  ExperimentConfig c;
  c.experiment = Experiment::kIsometry;
  c.n = 16;
  c.m = {32, 64};
  c.trials = 2;
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  CHECK(a.payload() == b.payload());
  CHECK(a.meta("wall_clock_seconds") != nullptr);
  CHECK(*a.meta("config.seed") == "42");
  CHECK(a.rows().size() == 2);
  CHECK(summarize(a).size() == 2);

  c.seed = 43;
  CHECK(run_experiment(c).payload() != a.payload());
}
