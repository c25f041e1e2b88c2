#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace opu {

// Packed binary vector. Bit j lives at bit (j % 64) of word (j / 64); unused
// high bits of the last word are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_(word_count(size), 0) {}

  static BitVector from_bools(const std::vector<bool>& bits);
  static BitVector from_words(std::span<const std::uint64_t> words, std::size_t size);
  // Nonzero entries become 1.
  static BitVector from_values(std::span<const double> values);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t j) const noexcept { return (words_[j >> 6] >> (j & 63)) & 1U; }
  void set(std::size_t j, bool value) noexcept;
  std::size_t popcount() const noexcept;

  std::vector<bool> to_bools() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  // Calls fn(j) for every set bit in increasing j.
  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int bit = __builtin_ctzll(word);
        fn(w * 64 + static_cast<std::size_t>(bit));
        word &= word - 1;
      }
    }
  }

  static constexpr std::size_t word_count(std::size_t bits) noexcept { return (bits + 63) / 64; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Rows of equal-length bit vectors.
class BitBatch {
 public:
  BitBatch() = default;
  explicit BitBatch(std::vector<BitVector> rows);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t width() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  const BitVector& operator[](std::size_t k) const noexcept { return rows_[k]; }
  bool empty() const noexcept { return rows_.empty(); }

  auto begin() const noexcept { return rows_.begin(); }
  auto end() const noexcept { return rows_.end(); }

 private:
  std::vector<BitVector> rows_;
};

}  // namespace opu
