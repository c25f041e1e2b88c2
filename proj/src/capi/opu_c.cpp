#include "opu/opu.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "opu/container.hpp"
#include "opu/device.hpp"
#include "opu/encoders.hpp"
#include "opu/errors.hpp"
#include "opu/experiment.hpp"
#include "opu/version.hpp"

struct opu_device {
  opu::Device device;
};

struct opu_encoder {
  opu::EncoderSpec spec;
};

struct opu_table {
  opu::ResultTable table;
};

namespace {

thread_local std::string g_last_error;
thread_local std::int64_t g_last_offset = -1;

template <typename Fn>
opu_status guarded(Fn&& fn) {
  g_last_error.clear();
  g_last_offset = -1;
  try {
    fn();
    return OPU_OK;
  } catch (const opu::ParseError& e) {
    g_last_error = e.what();
    g_last_offset = static_cast<std::int64_t>(e.offset());
    return static_cast<opu_status>(e.code());
  } catch (const opu::Error& e) {
    g_last_error = e.what();
    return static_cast<opu_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OPU_ERR_MEMORY_BUDGET;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OPU_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return OPU_ERR_INTERNAL;
  }
}

void require(bool condition, const char* what) {
  if (!condition) opu::fail(opu::ErrorCode::kInvalidArgument, what);
}

opu::DeviceConfig to_config(const opu_device_config& c) {
  opu::DeviceConfig cfg;
  cfg.seed = c.seed;
  cfg.input_dim = c.input_dim;
  cfg.output_dim = c.output_dim;
  require(c.mode == OPU_MODE_INTENSITY || c.mode == OPU_MODE_LINEAR, "unknown mode");
  require(c.storage == OPU_STORAGE_CACHED || c.storage == OPU_STORAGE_ON_THE_FLY, "unknown storage");
  cfg.mode = static_cast<opu::Mode>(c.mode);
  cfg.storage = static_cast<opu::Storage>(c.storage);
  cfg.quant_bits = c.quant_bits == 0 ? 8 : c.quant_bits;
  if (c.cache_budget_bytes != 0) cfg.cache_budget_bytes = c.cache_budget_bytes;
  return cfg;
}

void check_dim(std::uint64_t got, std::size_t expected, const char* what) {
  if (got != expected) {
    opu::fail(opu::ErrorCode::kDimensionMismatch,
              std::string(what) + " is " + std::to_string(got) + ", device expects " + std::to_string(expected));
  }
}

void copy_out(const std::vector<double>& src, double* dst) { std::memcpy(dst, src.data(), src.size() * sizeof(double)); }

}  // namespace

extern "C" {

const char* opu_version(void) { return opu::kVersion; }
const char* opu_last_error(void) { return g_last_error.c_str(); }
int64_t opu_last_error_offset(void) { return g_last_offset; }

const char* opu_status_name(opu_status status) {
  switch (status) {
    case OPU_OK: return "ok";
    case OPU_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OPU_ERR_DIMENSION: return "dimension mismatch";
    case OPU_ERR_MODE: return "mode mismatch";
    case OPU_ERR_MEMORY_BUDGET: return "memory budget exceeded";
    case OPU_ERR_NON_FINITE: return "non-finite value";
    case OPU_ERR_SINGULAR: return "singular system";
    case OPU_ERR_IO: return "i/o error";
    case OPU_ERR_FORMAT: return "format error";
    case OPU_ERR_UNSUPPORTED_VERSION: return "unsupported version";
    case OPU_ERR_IDENTITY: return "identity mismatch";
    case OPU_ERR_DIVERGENCE: return "divergence";
    case OPU_ERR_INVALID_CONFIG: return "invalid config";
    case OPU_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

opu_status opu_device_create(const opu_device_config* config, opu_device** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new opu_device{opu::Device::build(to_config(*config))};
  });
}

void opu_device_destroy(opu_device* device) { delete device; }

opu_status opu_device_get_config(const opu_device* device, opu_device_config* out) {
  return guarded([&] {
    require(device != nullptr && out != nullptr, "null argument");
    const auto& c = device->device.config();
    *out = {c.seed,
            c.input_dim,
            c.output_dim,
            static_cast<int32_t>(c.mode),
            c.quant_bits,
            static_cast<int32_t>(c.storage),
            c.cache_budget_bytes};
  });
}

opu_status opu_transform_intensity(const opu_device* device, const uint64_t* bits, uint64_t n, double* y, uint64_t m) {
  return guarded([&] {
    require(device != nullptr && bits != nullptr && y != nullptr, "null argument");
    check_dim(m, device->device.output_dim(), "output length");
    const auto x = opu::BitVector::from_words({bits, opu::BitVector::word_count(n)}, n);
    copy_out(device->device.transform_intensity(x).values, y);
  });
}

opu_status opu_transform_linear(const opu_device* device, const double* x, uint64_t n, double* y, uint64_t m) {
  return guarded([&] {
    require(device != nullptr && x != nullptr && y != nullptr, "null argument");
    check_dim(m, device->device.output_dim(), "output length");
    copy_out(device->device.transform_linear({x, n}).values, y);
  });
}

opu_status opu_transform_batch(const opu_device* device, const uint64_t* bits, uint64_t rows, uint64_t n,
                               uint16_t* values, double* scales, uint32_t threads) {
  return guarded([&] {
    require(device != nullptr && bits != nullptr && values != nullptr && scales != nullptr, "null argument");
    require(rows > 0, "empty batch");
    const auto words = opu::BitVector::word_count(n);
    std::vector<opu::BitVector> vecs;
    vecs.reserve(rows);
    for (std::uint64_t r = 0; r < rows; ++r) vecs.push_back(opu::BitVector::from_words({bits + r * words, words}, n));
    const auto out = device->device.transform_batch(opu::BitBatch(std::move(vecs)), threads);
    const auto m = device->device.output_dim();
    for (std::uint64_t r = 0; r < rows; ++r) {
      std::memcpy(values + r * m, out[r].values.data(), m * sizeof(uint16_t));
      scales[r] = out[r].scale;
    }
  });
}

opu_status opu_quantize(const double* y, uint64_t m, int32_t mode, int32_t quant_bits, uint16_t* values,
                        double* scale, double* offset) {
  return guarded([&] {
    require(y != nullptr && values != nullptr && scale != nullptr, "null argument");
    require(mode == OPU_MODE_INTENSITY || mode == OPU_MODE_LINEAR, "unknown mode");
    const opu::AnalogOutput analog{{y, y + m}, static_cast<opu::Mode>(mode)};
    const auto q = opu::quantize(analog, quant_bits);
    std::memcpy(values, q.values.data(), m * sizeof(uint16_t));
    *scale = q.scale;
    if (offset != nullptr) *offset = q.offset;
  });
}

opu_status opu_device_export(const opu_device* device, const char* path) {
  return guarded([&] {
    require(device != nullptr && path != nullptr, "null argument");
    opu::export_matrix(device->device, path);
  });
}

opu_status opu_device_import(const char* path, int32_t quant_bits, opu_device** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new opu_device{opu::import_matrix(path, quant_bits == 0 ? 8 : quant_bits)};
  });
}

opu_status opu_encoder_create(const char* spec, opu_encoder** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new opu_encoder{opu::EncoderSpec::parse(spec)};
  });
}

opu_status opu_encoder_fit(opu_encoder* encoder, const double* data, uint64_t rows, uint64_t cols) {
  return guarded([&] {
    require(encoder != nullptr && data != nullptr, "null argument");
    require(encoder->spec.scheme == opu::EncoderScheme::kThresholdPerFeature, "only the median encoder is fitted");
    encoder->spec = opu::fit_thresholds({{data, rows * cols}, rows, cols});
  });
}

opu_status opu_encoder_thresholds(const opu_encoder* encoder, double* out, uint64_t cols) {
  return guarded([&] {
    require(encoder != nullptr && out != nullptr, "null argument");
    require(encoder->spec.thresholds.has_value(), "encoder has no fitted thresholds");
    const auto& t = *encoder->spec.thresholds;
    check_dim(cols, t.size(), "threshold count");
    copy_out(t, out);
  });
}

opu_status opu_encoder_encode(const opu_encoder* encoder, const double* x, uint64_t n, uint64_t* bits,
                              uint64_t words) {
  return guarded([&] {
    require(encoder != nullptr && x != nullptr && bits != nullptr, "null argument");
    check_dim(words, opu::BitVector::word_count(n), "word count");
    const auto v = opu::encode(encoder->spec, {x, n});
    std::memcpy(bits, v.words().data(), words * sizeof(uint64_t));
  });
}

void opu_encoder_destroy(opu_encoder* encoder) { delete encoder; }

opu_status opu_config_validate(const char* config_text) {
  return guarded([&] {
    require(config_text != nullptr, "null argument");
    (void)opu::parse_config_text(config_text).resolve();
  });
}

opu_status opu_experiment_run(const char* config_text, opu_table** out) {
  return guarded([&] {
    require(config_text != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const auto config = opu::parse_config_text(config_text);
    *out = new opu_table{opu::run_experiment(config)};
  });
}

void opu_table_destroy(opu_table* table) { delete table; }

uint64_t opu_table_rows(const opu_table* table) { return table ? table->table.rows().size() : 0; }
uint64_t opu_table_cols(const opu_table* table) { return table ? table->table.columns().size() : 0; }

const char* opu_table_column_name(const opu_table* table, uint64_t col) {
  if (!table || col >= table->table.columns().size()) return nullptr;
  return table->table.columns()[col].c_str();
}

double opu_table_value(const opu_table* table, uint64_t row, uint64_t col) {
  if (!table || row >= table->table.rows().size() || col >= table->table.columns().size()) return 0.0;
  return table->table.rows()[row][col];
}

opu_status opu_table_csv(const opu_table* table, int32_t payload_only, char* buf, uint64_t capacity,
                         uint64_t* needed) {
  return guarded([&] {
    require(table != nullptr && needed != nullptr, "null argument");
    const auto text = payload_only ? table->table.payload() : table->table.to_csv();
    *needed = text.size() + 1;
    if (buf == nullptr) return;
    if (capacity < *needed) opu::fail(opu::ErrorCode::kInvalidArgument, "buffer too small for table text");
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

opu_status opu_table_write(const opu_table* table, const char* path) {
  return guarded([&] {
    require(table != nullptr && path != nullptr, "null argument");
    const auto text = table->table.to_csv();
    opu::write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  });
}

opu_status opu_table_write_gnuplot(const opu_table* table, const char* data_path, const char* script_path) {
  return guarded([&] {
    require(table != nullptr && data_path != nullptr && script_path != nullptr, "null argument");
    const auto text = table->table.gnuplot_script(data_path);
    opu::write_file(script_path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  });
}

}  // extern "C"
