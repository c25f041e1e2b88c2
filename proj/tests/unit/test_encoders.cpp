#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "opu/encoders.hpp"
#include "opu/errors.hpp"
#include "opu/rng.hpp"

using namespace opu;

TEST_CASE("bit vectors round-trip through packed words") {
  CounterStream rng(17, 17);
  for (std::size_t n = 0; n <= 130; ++n) {
    std::vector<bool> bools(n);
    for (std::size_t j = 0; j < n; ++j) bools[j] = rng.uniform() < 0.5;
    const auto bv = BitVector::from_bools(bools);
    REQUIRE(bv.to_bools() == bools);
    REQUIRE(BitVector::from_words(bv.words(), n) == bv);
    REQUIRE(bv.words().size() == BitVector::word_count(n));
    REQUIRE(static_cast<std::size_t>(std::count(bools.begin(), bools.end(), true)) == bv.popcount());
  }
}

TEST_CASE("bit packing is little-endian within words") {
  const auto bv = BitVector::from_bools({true, false, false, true});
  CHECK(bv.words()[0] == 0b1001U);
  // Unused high bits are masked on import.
  const std::uint64_t noisy[] = {~std::uint64_t{0}};
  const auto masked = BitVector::from_words(noisy, 3);
  CHECK(masked.words()[0] == 0b111U);
  CHECK(masked.popcount() == 3);
}

TEST_CASE("median fit") {
  const std::vector<double> col{1, 2, 3, 10};
  const auto spec = fit_thresholds({col, 4, 1});
  REQUIRE(spec.thresholds.has_value());
  CHECK((*spec.thresholds)[0] == 2.5);

  const std::vector<double> odd{5, -1, 3};
  CHECK((*fit_thresholds({odd, 3, 1}).thresholds)[0] == 3.0);
}

TEST_CASE("sign encoding, ties encode to 1") {
  const std::vector<double> x{-0.3, 0.0, 2.1};
  CHECK(encode(EncoderSpec::sign(), x).to_bools() == std::vector<bool>{false, true, true});
  CHECK(encode(EncoderSpec::global(2.1), x).to_bools() == std::vector<bool>{false, false, true});
}

TEST_CASE("median-encoded columns are roughly balanced") {
  CounterStream rng(4, 4);
  std::vector<double> data(100 * 8);
  for (std::size_t r = 0; r < 100; ++r) {
    for (std::size_t c = 0; c < 8; ++c) data[r * 8 + c] = rng.normal() * (1.0 + c) + 3.0 * c;
  }
  const MatrixView view{data, 100, 8};
  const auto spec = fit_thresholds(view);
  const auto bits = encode_rows(spec, view);
  for (std::size_t c = 0; c < 8; ++c) {
    int ones = 0;
    for (const auto& row : bits) ones += row.test(c);
    CHECK(ones >= 40);
    CHECK(ones <= 60);
  }
}

TEST_CASE("encodings are invariant under positive rescaling") {
  CounterStream rng(9, 9);
  std::vector<double> data(30 * 5), scaled(30 * 5);
  for (std::size_t k = 0; k < data.size(); ++k) {
    data[k] = rng.normal();
    scaled[k] = 7.5 * data[k];
  }
  const MatrixView a{data, 30, 5}, b{scaled, 30, 5};
  const auto fa = encode_rows(fit_thresholds(a), a);
  const auto fb = encode_rows(fit_thresholds(b), b);
  for (std::size_t r = 0; r < 30; ++r) {
    CHECK(fa[r] == fb[r]);
    CHECK(encode(EncoderSpec::sign(), a.row(r)) == encode(EncoderSpec::sign(), b.row(r)));
  }
}

TEST_CASE("encoder spec parsing") {
  CHECK(EncoderSpec::parse("sign").scheme == EncoderScheme::kSignBit);
  CHECK(EncoderSpec::parse("median").scheme == EncoderScheme::kThresholdPerFeature);
  const auto g = EncoderSpec::parse("global:0.25");
  CHECK(g.scheme == EncoderScheme::kThresholdGlobal);
  CHECK(g.global_threshold == 0.25);
  CHECK(EncoderSpec::parse(g.describe()) == g);
  for (const char* bad : {"", "global:", "global:x", "mean", "global:nan"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(EncoderSpec::parse(bad), Error);
  }
}

TEST_CASE("encoder errors") {
  const auto unfitted = EncoderSpec::parse("median");
  CHECK_FALSE(unfitted.fitted());
  const std::vector<double> x{1.0, 2.0};
  CHECK_THROWS_AS(encode(unfitted, x), Error);
  const std::vector<double> col{1, 2, 3};
  const auto fitted = fit_thresholds({col, 1, 3});
  const std::vector<double> short_x{1.0};
  try {
    encode(fitted, short_x);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  const std::vector<double> bad{1.0, NAN};
  try {
    encode(EncoderSpec::sign(), bad);
    FAIL("expected non-finite error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFinite);
  }
}
