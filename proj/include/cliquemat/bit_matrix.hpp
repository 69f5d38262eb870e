#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cliquemat {

// Dense row-major bit matrix. Each row is padded to a whole number of 64-bit
// words; padding bits are always zero so rows compare and intersect directly.
class BitMatrix {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;

  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows),
        cols_(cols),
        words_per_row_((cols + word_bits - 1) / word_bits),
        words_(rows * words_per_row_, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t r, std::size_t c) const noexcept {
    return (words_[r * words_per_row_ + c / word_bits] >> (c % word_bits)) & 1u;
  }

  void set(std::size_t r, std::size_t c, bool value = true) noexcept {
    word_type& w = words_[r * words_per_row_ + c / word_bits];
    const word_type bit = word_type{1} << (c % word_bits);
    w = value ? (w | bit) : (w & ~bit);
  }

  std::span<const word_type> row(std::size_t r) const noexcept {
    return {words_.data() + r * words_per_row_, words_per_row_};
  }

  std::size_t row_count(std::size_t r) const noexcept {
    std::size_t n = 0;
    for (word_type w : row(r)) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // True iff rows r1 and r2 share at least one set column.
  bool rows_intersect(std::size_t r1, std::size_t r2) const noexcept {
    const word_type* a = words_.data() + r1 * words_per_row_;
    const word_type* b = words_.data() + r2 * words_per_row_;
    for (std::size_t w = 0; w < words_per_row_; ++w)
      if (a[w] & b[w]) return true;
    return false;
  }

  std::size_t rows_overlap(std::size_t r1, std::size_t r2) const noexcept {
    const word_type* a = words_.data() + r1 * words_per_row_;
    const word_type* b = words_.data() + r2 * words_per_row_;
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_per_row_; ++w)
      n += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    return n;
  }

  BitMatrix transposed() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) t.set(c, r);
    return t;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<word_type> words_;
};

}  // namespace cliquemat
