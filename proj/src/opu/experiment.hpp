#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opu/result_table.hpp"

namespace opu {

enum class Experiment { kIsometry, kApproxMatvec, kRsvd, kKernel, kTransfer, kDfa, kThroughput };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

// Flat key = value settings. Unset fields take per-experiment defaults in
// resolve().
struct ExperimentConfig {
  Experiment experiment = Experiment::kIsometry;
  std::uint64_t seed = 42;
  std::size_t n = 0;
  std::vector<std::size_t> m;     // output dims sweep
  std::vector<double> ratios;     // m/n sweep (approx-matvec); overrides m
  std::size_t trials = 0;
  std::string dataset;
  std::string encoder;
  std::string out;
  std::size_t samples = 0;
  std::size_t epochs = 0;
  double lr = -1.0;
  std::size_t batch = 0;
  std::vector<std::size_t> hidden;
  std::size_t rank = 0;
  std::size_t oversampling = 0;
  std::optional<std::size_t> power_iters;
  double lambda = -1.0;
  std::string report;  // optional JSON-lines training report (dfa)

  // Applies per-experiment defaults and checks invariants (kInvalidConfig).
  ExperimentConfig resolve() const;
  // Echo of the resolved settings, in key order.
  std::map<std::string, std::string> echo() const;
};

// Parses "key = value" lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

// Runs the experiment and returns its table; summary lines (one per sweep
// point) are available via summarize().
ResultTable run_experiment(const ExperimentConfig& config);
std::vector<std::string> summarize(const ResultTable& table);

}  // namespace opu
