// opubench: experiment runner and matrix/sketch file tool over the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opu/opu.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct DeviceDeleter {
  void operator()(opu_device* d) const { opu_device_destroy(d); }
};
struct EncoderDeleter {
  void operator()(opu_encoder* e) const { opu_encoder_destroy(e); }
};
struct TableDeleter {
  void operator()(opu_table* t) const { opu_table_destroy(t); }
};
using DevicePtr = std::unique_ptr<opu_device, DeviceDeleter>;
using EncoderPtr = std::unique_ptr<opu_encoder, EncoderDeleter>;
using TablePtr = std::unique_ptr<opu_table, TableDeleter>;

int report(opu_status status, const char* context) {
  std::cerr << "opubench: " << context << ": " << opu_status_name(status) << ": " << opu_last_error() << "\n";
  return status == OPU_ERR_INVALID_CONFIG ? kExitUsage : kExitFailure;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ExperimentArgs {
  std::string seed, n, m, trials, dataset, out, encoder, config;
  std::vector<std::string> settings;
  bool plot = false;
};

std::string build_config(const std::string& experiment, const ExperimentArgs& a) {
  std::string text = a.config.empty() ? "" : read_text(a.config) + "\n";
  text += "experiment = " + experiment + "\n";
  auto add = [&](const char* key, const std::string& value) {
    if (!value.empty()) text += std::string(key) + " = " + value + "\n";
  };
  add("seed", a.seed);
  add("n", a.n);
  add("m", a.m);
  add("trials", a.trials);
  add("dataset", a.dataset);
  add("encoder", a.encoder);
  for (const auto& s : a.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
    text += s.substr(0, eq) + " = " + s.substr(eq + 1) + "\n";
  }
  return text;
}

int run_experiment(const std::string& experiment, const ExperimentArgs& args) {
  std::string config;
  try {
    config = build_config(experiment, args);
  } catch (const std::exception& e) {
    std::cerr << "opubench: " << e.what() << "\n";
    return kExitUsage;
  }
  if (const auto s = opu_config_validate(config.c_str()); s != OPU_OK) return report(s, "config");

  opu_table* raw = nullptr;
  if (const auto s = opu_experiment_run(config.c_str(), &raw); s != OPU_OK) return report(s, experiment.c_str());
  TablePtr table(raw);

  const auto rows = opu_table_rows(table.get());
  const auto cols = opu_table_cols(table.get());
  for (std::uint64_t r = 0; r < rows; ++r) {
    std::cerr << experiment << ":";
    for (std::uint64_t c = 0; c < cols; ++c) {
      std::cerr << ' ' << opu_table_column_name(table.get(), c) << '=' << opu_table_value(table.get(), r, c);
    }
    std::cerr << "\n";
  }

  if (!args.out.empty()) {
    if (const auto s = opu_table_write(table.get(), args.out.c_str()); s != OPU_OK) return report(s, "write");
    if (args.plot) {
      const auto script = args.out + ".gp";
      if (const auto s = opu_table_write_gnuplot(table.get(), args.out.c_str(), script.c_str()); s != OPU_OK) {
        return report(s, "write");
      }
    }
    return kExitOk;
  }
  std::uint64_t needed = 0;
  opu_table_csv(table.get(), 0, nullptr, 0, &needed);
  std::string csv(needed, '\0');
  if (const auto s = opu_table_csv(table.get(), 0, csv.data(), needed, &needed); s != OPU_OK) return report(s, "csv");
  csv.resize(needed - 1);
  std::cout << csv;
  return kExitOk;
}

opu_device_config device_config(std::uint64_t seed, std::uint64_t n, std::uint64_t m, const std::string& mode) {
  opu_device_config cfg{};
  cfg.seed = seed;
  cfg.input_dim = n;
  cfg.output_dim = m;
  cfg.mode = mode == "linear" ? OPU_MODE_LINEAR : OPU_MODE_INTENSITY;
  cfg.quant_bits = 8;
  cfg.storage = OPU_STORAGE_CACHED;
  return cfg;
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical random-projection simulator: experiments, matrix export, and transforms"};
  app.set_version_flag("--version", std::string("opubench ") + opu_version());
  app.require_subcommand(1);

  ExperimentArgs args;
  std::string chosen;
  const std::vector<std::pair<std::string, std::string>> experiments{
      {"isometry", "sketch isometry residual vs m"},
      {"approx-matvec", "compressed matvec error vs compression ratio"},
      {"rsvd", "randomized SVD on a known spectrum"},
      {"kernel", "random-feature kernel estimate vs m"},
      {"transfer", "random-feature ridge vs linear baseline"},
      {"dfa", "direct feedback alignment training curve"},
      {"throughput", "simulator batch throughput"}};
  for (const auto& [name, help] : experiments) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--seed", args.seed, "base seed (u64)");
    sub->add_option("--n", args.n, "input dimension");
    sub->add_option("--m", args.m, "output dimension or comma-separated sweep");
    sub->add_option("--trials", args.trials, "trials per sweep point");
    sub->add_option("--dataset", args.dataset, "dataset / operand name");
    sub->add_option("--out", args.out, "CSV output path (stdout if omitted)");
    sub->add_option("--encoder", args.encoder, "global:T | median | sign");
    sub->add_option("--config", args.config, "flat key = value config file (flags override)");
    sub->add_option("--set", args.settings, "extra key=value setting (repeatable)");
    sub->add_flag("--plot", args.plot, "also write <out>.gp gnuplot script");
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  std::uint64_t seed = 0, n = 0, m = 0;
  std::string mode = "intensity", path, input, encoder_spec, matrix;
  auto* exp = app.add_subcommand("export", "write a device matrix to an OPUS container");
  exp->add_option("--seed", seed)->required();
  exp->add_option("--n", n)->required();
  exp->add_option("--m", m)->required();
  exp->add_option("--mode", mode)->check(CLI::IsMember({"intensity", "linear"}));
  exp->add_option("--out", path)->required();

  auto* inspect = app.add_subcommand("inspect", "validate an OPUS matrix container and print its header");
  inspect->add_option("--in", path)->required();

  auto* transform = app.add_subcommand("transform", "quantized intensity transform of CSV rows");
  transform->add_option("--seed", seed);
  transform->add_option("--n", n);
  transform->add_option("--m", m);
  transform->add_option("--matrix", matrix, "use an exported OPUS container instead of seed/n/m");
  transform->add_option("--in", input, "CSV rows (0/1 bits, or reals with --encoder)")->required();
  transform->add_option("--encoder", encoder_spec, "binarize rows first: global:T | median | sign");
  transform->add_option("--out", path, "CSV output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!chosen.empty()) return run_experiment(chosen, args);

    if (exp->parsed()) {
      opu_device* raw = nullptr;
      const auto cfg = device_config(seed, n, m, mode);
      if (const auto s = opu_device_create(&cfg, &raw); s != OPU_OK) return report(s, "export");
      DevicePtr device(raw);
      if (const auto s = opu_device_export(device.get(), path.c_str()); s != OPU_OK) return report(s, "export");
      std::cerr << "export: wrote " << path << "\n";
      return kExitOk;
    }

    if (inspect->parsed()) {
      opu_device* raw = nullptr;
      if (const auto s = opu_device_import(path.c_str(), 8, &raw); s != OPU_OK) return report(s, "inspect");
      DevicePtr device(raw);
      opu_device_config cfg{};
      opu_device_get_config(device.get(), &cfg);
      std::cout << "mode=" << (cfg.mode == OPU_MODE_LINEAR ? "linear" : "intensity") << " n=" << cfg.input_dim
                << " m=" << cfg.output_dim << " seed=" << cfg.seed << "\n";
      return kExitOk;
    }

    if (transform->parsed()) {
      opu_device* raw = nullptr;
      if (!matrix.empty()) {
        if (const auto s = opu_device_import(matrix.c_str(), 8, &raw); s != OPU_OK) return report(s, "transform");
      } else {
        if (n == 0 || m == 0) {
          std::cerr << "opubench: transform needs --matrix or --n and --m\n";
          return kExitUsage;
        }
        const auto cfg = device_config(seed, n, m, "intensity");
        if (const auto s = opu_device_create(&cfg, &raw); s != OPU_OK) return report(s, "transform");
      }
      DevicePtr device(raw);
      opu_device_config cfg{};
      opu_device_get_config(device.get(), &cfg);

      const auto rows = read_rows(input);
      if (rows.empty()) {
        std::cerr << "opubench: no input rows in " << input << "\n";
        return kExitFailure;
      }
      const std::uint64_t width = cfg.input_dim;
      const std::uint64_t words = (width + 63) / 64;
      std::vector<std::uint64_t> bits(rows.size() * words, 0);
      EncoderPtr encoder;
      if (!encoder_spec.empty()) {
        opu_encoder* e = nullptr;
        if (const auto s = opu_encoder_create(encoder_spec.c_str(), &e); s != OPU_OK) return report(s, "encoder");
        encoder.reset(e);
        if (encoder_spec == "median") {
          std::vector<double> flat;
          for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
          if (const auto s = opu_encoder_fit(encoder.get(), flat.data(), rows.size(), rows.front().size());
              s != OPU_OK) {
            return report(s, "encoder");
          }
        }
      }
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
          std::cerr << "opubench: row " << r << " has " << rows[r].size() << " values, expected n = " << width << "\n";
          return kExitFailure;
        }
        if (encoder) {
          if (const auto s = opu_encoder_encode(encoder.get(), rows[r].data(), width, &bits[r * words], words);
              s != OPU_OK) {
            return report(s, "encode");
          }
        } else {
          for (std::uint64_t j = 0; j < width; ++j) {
            const double v = rows[r][j];
            if (v != 0.0 && v != 1.0) {
              std::cerr << "opubench: row " << r << " value " << v << " is not 0/1; pass --encoder for real-valued rows\n";
              return kExitFailure;
            }
            if (v == 1.0) bits[r * words + j / 64] |= std::uint64_t{1} << (j % 64);
          }
        }
      }
      std::vector<std::uint16_t> values(rows.size() * cfg.output_dim);
      std::vector<double> scales(rows.size());
      if (const auto s = opu_transform_batch(device.get(), bits.data(), rows.size(), width, values.data(),
                                             scales.data(), 0);
          s != OPU_OK) {
        return report(s, "transform");
      }
      std::ostringstream os;
      os << "# seed: " << cfg.seed << "\n# n: " << cfg.input_dim << "\n# m: " << cfg.output_dim << "\n";
      os << "scale";
      for (std::uint64_t i = 0; i < cfg.output_dim; ++i) os << ",y" << i;
      os << "\n";
      for (std::size_t r = 0; r < rows.size(); ++r) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", scales[r]);
        os << buf;
        for (std::uint64_t i = 0; i < cfg.output_dim; ++i) os << ',' << values[r * cfg.output_dim + i];
        os << "\n";
      }
      if (path.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream out(path);
        if (!out) {
          std::cerr << "opubench: cannot write " << path << "\n";
          return kExitFailure;
        }
        out << os.str();
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "opubench: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
