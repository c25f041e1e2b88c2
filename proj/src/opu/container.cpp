#include "opu/container.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "opu/errors.hpp"

namespace opu {

void ByteWriter::f32(float v) { le(std::bit_cast<std::uint32_t>(v), 4); }
void ByteWriter::f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }

void ByteWriter::header(const ContainerHeader& h) {
  bytes("OPUS");
  u16(h.version);
  u8(static_cast<std::uint8_t>(h.mode));
  u64(h.n);
  u64(h.m);
  u64(h.seed);
}

void ByteReader::need(std::size_t count) {
  if (remaining() < count) {
    throw ParseError(ErrorCode::kFormat, pos_,
                     "truncated container: need " + std::to_string(count) + " bytes, " +
                         std::to_string(remaining()) + " left");
  }
}

std::uint64_t ByteReader::le(int width) {
  need(static_cast<std::size_t>(width));
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(data_[pos_ + b]) << (8 * b);
  pos_ += static_cast<std::size_t>(width);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(le(4))); }
double ByteReader::f64() { return std::bit_cast<double>(le(8)); }

void ByteReader::expect_tag(std::string_view tag, const char* what) {
  const auto at = pos_;
  need(tag.size());
  for (std::size_t k = 0; k < tag.size(); ++k) {
    if (data_[pos_ + k] != static_cast<std::uint8_t>(tag[k])) {
      throw ParseError(ErrorCode::kFormat, at, std::string("bad ") + what + ": expected \"" + std::string(tag) + "\"");
    }
  }
  pos_ += tag.size();
}

ContainerHeader ByteReader::header() {
  ContainerHeader h;
  expect_tag("OPUS", "magic bytes");
  const auto version_at = pos_;
  h.version = u16();
  if (h.version == 0 || h.version > kContainerVersion) {
    throw ParseError(ErrorCode::kUnsupportedVersion, version_at,
                     "unsupported version " + std::to_string(h.version) + " (supported: " +
                         std::to_string(kContainerVersion) + ")");
  }
  const auto mode_at = pos_;
  const auto mode = u8();
  if (mode > 1) throw ParseError(ErrorCode::kFormat, mode_at, "invalid mode byte " + std::to_string(mode));
  h.mode = static_cast<Mode>(mode);
  const auto dims_at = pos_;
  h.n = u64();
  h.m = u64();
  h.seed = u64();
  if (h.n == 0 || h.m == 0) throw ParseError(ErrorCode::kFormat, dims_at, "zero dimension in header");
  return h;
}

std::vector<std::uint8_t> serialize_matrix(const Device& device) {
  const auto& cfg = device.config();
  if (cfg.cached_bytes() > cfg.cache_budget_bytes) {
    fail(ErrorCode::kMemoryBudget, "matrix export needs " + std::to_string(cfg.cached_bytes()) +
                                       " bytes, budget is " + std::to_string(cfg.cache_budget_bytes));
  }
  ByteWriter w;
  w.header({kContainerVersion, cfg.mode, cfg.input_dim, cfg.output_dim, cfg.seed});
  for (float v : device.materialize()) w.f32(v);
  return w.take();
}

Device parse_matrix(std::span<const std::uint8_t> bytes, int quant_bits) {
  ByteReader r(bytes);
  const auto h = r.header();
  DeviceConfig cfg;
  cfg.seed = h.seed;
  cfg.input_dim = h.n;
  cfg.output_dim = h.m;
  cfg.mode = h.mode;
  cfg.quant_bits = quant_bits;
  cfg.storage = Storage::kCached;
  const long double expected = static_cast<long double>(h.n) * h.m * cfg.floats_per_entry() * 4;
  if (expected != static_cast<long double>(r.remaining())) {
    throw ParseError(ErrorCode::kFormat, r.offset(),
                     "matrix payload has " + std::to_string(r.remaining()) + " bytes, header implies " +
                         std::to_string(static_cast<unsigned long long>(expected)));
  }
  std::vector<float> entries(h.n * h.m * cfg.floats_per_entry());
  for (auto& v : entries) v = r.f32();
  auto device = Device::with_matrix(cfg, std::move(entries));
  return device;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void export_matrix(const Device& device, const std::filesystem::path& path) {
  const auto bytes = serialize_matrix(device);
  write_file(path, bytes);
}

Device import_matrix(const std::filesystem::path& path, int quant_bits) {
  return parse_matrix(read_file(path), quant_bits);
}

}  // namespace opu
