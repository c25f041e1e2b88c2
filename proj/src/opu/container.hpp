#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "opu/device.hpp"

namespace opu {

// "OPUS" container. All integers and floats little-endian.
//   0  magic  "OPUS"
//   4  version u16
//   6  mode    u8  (0 = intensity, 1 = linear)
//   7  n       u64
//   15 m       u64
//   23 seed    u64
//   31 payload
// Matrix payload: m*n entries of f32 (pairs re, im in intensity mode), row-major.
// Sketch payload: "SKCH", r u64, source n u64, then m*r f64 row-major.
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 31;

struct ContainerHeader {
  std::uint16_t version = kContainerVersion;
  Mode mode = Mode::kIntensity;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
};

class ByteWriter {
 public:
  void bytes(std::string_view tag) { buf_.insert(buf_.end(), tag.begin(), tag.end()); }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f32(float v);
  void f64(double v);
  void header(const ContainerHeader& h);

  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  void le(std::uint64_t v, int width) {
    for (int b = 0; b < width; ++b) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void expect_tag(std::string_view tag, const char* what);
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint64_t u64() { return le(8); }
  float f32();
  double f64();
  ContainerHeader header();

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  std::uint64_t le(int width);
  void need(std::size_t count);

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> serialize_matrix(const Device& device);
// The imported device uses cached storage and the given quantization depth.
Device parse_matrix(std::span<const std::uint8_t> bytes, int quant_bits = 8);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

void export_matrix(const Device& device, const std::filesystem::path& path);
Device import_matrix(const std::filesystem::path& path, int quant_bits = 8);

}  // namespace opu
