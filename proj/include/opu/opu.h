/*
 * C interface to the optical random-projection simulator.
 *
 * All functions return an opu_status. On failure, opu_last_error() returns a
 * message for the calling thread that stays valid until the next call on that
 * thread. Handles are opaque; every *_create / *_import has a matching
 * *_destroy that accepts NULL.
 */
#ifndef OPU_OPU_H
#define OPU_OPU_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OPU_BUILDING_LIBRARY)
#    define OPU_API __declspec(dllexport)
#  else
#    define OPU_API __declspec(dllimport)
#  endif
#else
#  define OPU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opu_status {
  OPU_OK = 0,
  OPU_ERR_INVALID_ARGUMENT = 1,
  OPU_ERR_DIMENSION = 2,
  OPU_ERR_MODE = 3,
  OPU_ERR_MEMORY_BUDGET = 4,
  OPU_ERR_NON_FINITE = 5,
  OPU_ERR_SINGULAR = 6,
  OPU_ERR_IO = 7,
  OPU_ERR_FORMAT = 8,
  OPU_ERR_UNSUPPORTED_VERSION = 9,
  OPU_ERR_IDENTITY = 10,
  OPU_ERR_DIVERGENCE = 11,
  OPU_ERR_INVALID_CONFIG = 12,
  OPU_ERR_INTERNAL = 100
} opu_status;

typedef enum opu_mode { OPU_MODE_INTENSITY = 0, OPU_MODE_LINEAR = 1 } opu_mode;
typedef enum opu_storage { OPU_STORAGE_CACHED = 0, OPU_STORAGE_ON_THE_FLY = 1 } opu_storage;

typedef struct opu_device_config {
  uint64_t seed;
  uint64_t input_dim;  /* n */
  uint64_t output_dim; /* m */
  int32_t mode;        /* opu_mode */
  int32_t quant_bits;  /* 1..16, 8 if 0 */
  int32_t storage;     /* opu_storage */
  uint64_t cache_budget_bytes; /* default budget if 0 */
} opu_device_config;

typedef struct opu_device opu_device;
typedef struct opu_encoder opu_encoder;
typedef struct opu_table opu_table;

OPU_API const char* opu_version(void);
OPU_API const char* opu_last_error(void);
/* Byte offset of the last container parse error, or -1. */
OPU_API int64_t opu_last_error_offset(void);
OPU_API const char* opu_status_name(opu_status status);

/* Devices. Bit inputs are packed little-endian in 64-bit words: bit j is
 * bit (j % 64) of word (j / 64); ceil(n / 64) words per vector. */
OPU_API opu_status opu_device_create(const opu_device_config* config, opu_device** out);
OPU_API void opu_device_destroy(opu_device* device);
OPU_API opu_status opu_device_get_config(const opu_device* device, opu_device_config* out);

OPU_API opu_status opu_transform_intensity(const opu_device* device, const uint64_t* bits, uint64_t n, double* y,
                                           uint64_t m);
OPU_API opu_status opu_transform_linear(const opu_device* device, const double* x, uint64_t n, double* y, uint64_t m);
/* rows x m levels in values, one scale per row. threads = 0 uses all cores. */
OPU_API opu_status opu_transform_batch(const opu_device* device, const uint64_t* bits, uint64_t rows, uint64_t n,
                                       uint16_t* values, double* scales, uint32_t threads);
OPU_API opu_status opu_quantize(const double* y, uint64_t m, int32_t mode, int32_t quant_bits, uint16_t* values,
                                double* scale, double* offset);

OPU_API opu_status opu_device_export(const opu_device* device, const char* path);
OPU_API opu_status opu_device_import(const char* path, int32_t quant_bits, opu_device** out);

/* Encoders: spec is "sign", "median", or "global:T". "median" must be fitted. */
OPU_API opu_status opu_encoder_create(const char* spec, opu_encoder** out);
OPU_API opu_status opu_encoder_fit(opu_encoder* encoder, const double* data, uint64_t rows, uint64_t cols);
OPU_API opu_status opu_encoder_thresholds(const opu_encoder* encoder, double* out, uint64_t cols);
OPU_API opu_status opu_encoder_encode(const opu_encoder* encoder, const double* x, uint64_t n, uint64_t* bits,
                                      uint64_t words);
OPU_API void opu_encoder_destroy(opu_encoder* encoder);

/* Experiments. config_text is flat "key = value" lines. */
OPU_API opu_status opu_experiment_run(const char* config_text, opu_table** out);
OPU_API opu_status opu_config_validate(const char* config_text);
OPU_API void opu_table_destroy(opu_table* table);
OPU_API uint64_t opu_table_rows(const opu_table* table);
OPU_API uint64_t opu_table_cols(const opu_table* table);
OPU_API const char* opu_table_column_name(const opu_table* table, uint64_t col);
OPU_API double opu_table_value(const opu_table* table, uint64_t row, uint64_t col);
/* Copies the CSV text (NUL-terminated) into buf; *needed gets the size
 * including the terminator. buf = NULL only queries the size; a short buffer
 * is OPU_ERR_INVALID_ARGUMENT. payload_only drops the wall-clock line. */
OPU_API opu_status opu_table_csv(const opu_table* table, int32_t payload_only, char* buf, uint64_t capacity,
                                 uint64_t* needed);
OPU_API opu_status opu_table_write(const opu_table* table, const char* path);
OPU_API opu_status opu_table_write_gnuplot(const opu_table* table, const char* data_path, const char* script_path);

#ifdef __cplusplus
}
#endif

#endif /* OPU_OPU_H */
