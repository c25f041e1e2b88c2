#include <filesystem>
#include <vector>

#include "doctest.h"
#include "opu/container.hpp"
#include "opu/errors.hpp"
#include "opu/rnla.hpp"

using namespace opu;

namespace {

DeviceConfig config(std::uint64_t seed, std::size_t n, std::size_t m, Mode mode) {
  DeviceConfig c;
  c.seed = seed;
  c.input_dim = n;
  c.output_dim = m;
  c.mode = mode;
  return c;
}

template <typename Fn>
const ParseError expect_parse_error(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected ParseError");
  throw;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("opu_test_" + name);
}

}  // namespace

TEST_CASE("matrix container round-trip preserves the transform") {
  for (auto mode : {Mode::kIntensity, Mode::kLinear}) {
    const auto device = Device::build(config(31, 19, 7, mode));
    const auto bytes = serialize_matrix(device);
    CHECK(bytes.size() == kContainerHeaderSize + 19 * 7 * device.config().floats_per_entry() * 4);
    const auto back = parse_matrix(bytes);
    CHECK(back.config().same_transform(device.config()));
    CHECK(back.materialize() == device.materialize());
    if (mode == Mode::kIntensity) {
      BitVector x(19);
      for (std::size_t j = 0; j < 19; j += 3) x.set(j, true);
      CHECK(back.transform_intensity(x).values == device.transform_intensity(x).values);
    }
  }
}

TEST_CASE("header layout") {
  const auto bytes = serialize_matrix(Device::build(config(0x0102030405060708ULL, 2, 3, Mode::kLinear)));
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "OPUS");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);
  CHECK(bytes[7] == 2);
  CHECK(bytes[15] == 3);
  CHECK(bytes[23] == 0x08);
  CHECK(bytes[30] == 0x01);
}

TEST_CASE("file round-trip") {
  const auto device = Device::build(config(5, 16, 4, Mode::kLinear));
  const auto path = temp_path("matrix.opus");
  export_matrix(device, path);
  const auto back = import_matrix(path);
  CHECK(back.materialize() == device.materialize());
  std::filesystem::remove(path);
  try {
    import_matrix(path);
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("corrupt containers report an offset") {
  const auto good = serialize_matrix(Device::build(config(1, 4, 4, Mode::kIntensity)));
  SUBCASE("magic") {
    auto bytes = good;
    bytes[0] = 'X';
    const auto e = expect_parse_error([&] { parse_matrix(bytes); });
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(e.offset() == 0);
  }
  SUBCASE("future version") {
    auto bytes = good;
    bytes[4] = 2;
    const auto e = expect_parse_error([&] { parse_matrix(bytes); });
    CHECK(e.code() == ErrorCode::kUnsupportedVersion);
    CHECK(e.offset() == 4);
  }
  SUBCASE("bad mode") {
    auto bytes = good;
    bytes[6] = 9;
    const auto e = expect_parse_error([&] { parse_matrix(bytes); });
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(e.offset() == 6);
  }
  SUBCASE("truncated payload") {
    auto bytes = good;
    bytes.resize(bytes.size() - 3);
    const auto e = expect_parse_error([&] { parse_matrix(bytes); });
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(e.offset() >= kContainerHeaderSize);
  }
  SUBCASE("truncated header") {
    std::vector<std::uint8_t> bytes(good.begin(), good.begin() + 10);
    const auto e = expect_parse_error([&] { parse_matrix(bytes); });
    CHECK(e.code() == ErrorCode::kFormat);
  }
  SUBCASE("trailing bytes") {
    auto bytes = good;
    bytes.push_back(0);
    CHECK_THROWS_AS(parse_matrix(bytes), ParseError);
  }
}

TEST_CASE("sketch container round-trip and identity check") {
  const auto op = SketchOperator::gaussian(12, 10, 32);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 10);
  const auto sketch = precompute_sketch(op, a);
  const auto back = parse_sketch(serialize_sketch(sketch));
  CHECK(back.a_tilde == sketch.a_tilde);
  CHECK(back.identity == sketch.identity);
  CHECK(back.source_rows == 3);
  CHECK(back.source_cols == 10);

  const auto path = temp_path("sketch.opus");
  save_sketch(sketch, path);
  CHECK(load_sketch(path, op.identity()).a_tilde == sketch.a_tilde);
  const auto other = SketchOperator::gaussian(13, 10, 32);
  try {
    load_sketch(path, other.identity());
    FAIL("expected identity mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIdentityMismatch);
  }
  std::filesystem::remove(path);

  // A matrix container is not a sketch container.
  const auto matrix_bytes = serialize_matrix(Device::build(config(1, 4, 4, Mode::kLinear)));
  CHECK_THROWS_AS(parse_sketch(matrix_bytes), ParseError);
}
