#include "opu/bits.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "opu/errors.hpp"

namespace opu {

BitVector BitVector::from_bools(const std::vector<bool>& bits) {
  BitVector v(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) v.set(j, bits[j]);
  return v;
}

BitVector BitVector::from_words(std::span<const std::uint64_t> words, std::size_t size) {
  if (words.size() < word_count(size)) {
    fail(ErrorCode::kDimensionMismatch, "bit vector of length " + std::to_string(size) + " needs " +
                                            std::to_string(word_count(size)) + " words, got " +
                                            std::to_string(words.size()));
  }
  BitVector v(size);
  std::copy_n(words.begin(), v.words_.size(), v.words_.begin());
  if (const auto tail = size & 63; tail != 0) v.words_.back() &= (std::uint64_t{1} << tail) - 1;
  return v;
}

BitVector BitVector::from_values(std::span<const double> values) {
  BitVector v(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) v.set(j, values[j] != 0.0);
  return v;
}

void BitVector::set(std::size_t j, bool value) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (j & 63);
  if (value) {
    words_[j >> 6] |= mask;
  } else {
    words_[j >> 6] &= ~mask;
  }
}

std::size_t BitVector::popcount() const noexcept {
  return std::accumulate(words_.begin(), words_.end(), std::size_t{0},
                         [](std::size_t acc, std::uint64_t w) { return acc + std::popcount(w); });
}

std::vector<bool> BitVector::to_bools() const {
  std::vector<bool> out(size_);
  for (std::size_t j = 0; j < size_; ++j) out[j] = test(j);
  return out;
}

BitBatch::BitBatch(std::vector<BitVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) fail(ErrorCode::kInvalidArgument, "empty batch");
  const auto n = rows_.front().size();
  for (std::size_t k = 1; k < rows_.size(); ++k) {
    if (rows_[k].size() != n) {
      fail(ErrorCode::kDimensionMismatch, "ragged batch: row " + std::to_string(k) + " has length " +
                                              std::to_string(rows_[k].size()) + ", expected " +
                                              std::to_string(n));
    }
  }
}

}  // namespace opu
