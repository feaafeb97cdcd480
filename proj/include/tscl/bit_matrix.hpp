#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tscl {

/// Square boolean matrix stored as packed rows of 64-bit words.
///
/// Row r occupies words [r * words_per_row, (r + 1) * words_per_row). Bits
/// beyond column n-1 in the last word of a row are always zero, so whole-row
/// comparisons and popcounts need no masking.
class BitMatrix {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitMatrix() = default;

  explicit BitMatrix(std::size_t n)
      : n_(n), words_per_row_((n + kWordBits - 1) / kWordBits), bits_(n * words_per_row_, 0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

  bool test(std::size_t r, std::size_t c) const noexcept {
    assert(r < n_ && c < n_);
    return (bits_[r * words_per_row_ + c / kWordBits] >> (c % kWordBits)) & 1U;
  }

  void set(std::size_t r, std::size_t c, bool value = true) noexcept {
    assert(r < n_ && c < n_);
    Word& w = bits_[r * words_per_row_ + c / kWordBits];
    const Word mask = Word{1} << (c % kWordBits);
    w = value ? (w | mask) : (w & ~mask);
  }

  void reset(std::size_t r, std::size_t c) noexcept { set(r, c, false); }

  std::span<Word> row(std::size_t r) noexcept {
    return {bits_.data() + r * words_per_row_, words_per_row_};
  }
  std::span<const Word> row(std::size_t r) const noexcept {
    return {bits_.data() + r * words_per_row_, words_per_row_};
  }

  std::span<const Word> words() const noexcept { return bits_; }

  void clear() noexcept { std::fill(bits_.begin(), bits_.end(), Word{0}); }

  void fill() noexcept {
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) set(r, c);
    }
  }

  void clear_diagonal() noexcept {
    for (std::size_t i = 0; i < n_; ++i) reset(i, i);
  }

  std::size_t count() const noexcept {
    std::size_t total = 0;
    for (Word w : bits_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  bool none() const noexcept {
    for (Word w : bits_) {
      if (w != 0) return false;
    }
    return true;
  }

  bool row_any(std::size_t r) const noexcept {
    for (Word w : row(r)) {
      if (w != 0) return true;
    }
    return false;
  }

  /// Calls fn(c) for every set column of row r, ascending.
  template <typename Fn>
  void for_each_in_row(std::size_t r, Fn&& fn) const {
    const auto words = row(r);
    for (std::size_t k = 0; k < words.size(); ++k) {
      Word w = words[k];
      while (w != 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(w));
        fn(k * kWordBits + bit);
        w &= w - 1;
      }
    }
  }

  /// Calls fn(r, c) for every set entry in row-major order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t r = 0; r < n_; ++r) {
      for_each_in_row(r, [&](std::size_t c) { fn(r, c); });
    }
  }

  BitMatrix& operator|=(const BitMatrix& other) noexcept {
    assert(n_ == other.n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
    return *this;
  }

  BitMatrix& operator&=(const BitMatrix& other) noexcept {
    assert(n_ == other.n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= other.bits_[i];
    return *this;
  }

  /// this & ~other
  BitMatrix& subtract(const BitMatrix& other) noexcept {
    assert(n_ == other.n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~other.bits_[i];
    return *this;
  }

  bool is_subset_of(const BitMatrix& other) const noexcept {
    if (n_ != other.n_) return false;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if ((bits_[i] & ~other.bits_[i]) != 0) return false;
    }
    return true;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<Word> bits_;
};

/// dst |= src, row-wise.
inline void or_row(std::span<BitMatrix::Word> dst, std::span<const BitMatrix::Word> src) noexcept {
  assert(dst.size() == src.size());
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] |= src[k];
}

/// Boolean product: out(i, j) = OR_k lhs(i, k) AND rhs(k, j).
inline void multiply(const BitMatrix& lhs, const BitMatrix& rhs, BitMatrix& out) {
  assert(lhs.size() == rhs.size());
  if (out.size() != lhs.size()) out = BitMatrix(lhs.size());
  out.clear();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    auto dst = out.row(i);
    lhs.for_each_in_row(i, [&](std::size_t k) { or_row(dst, rhs.row(k)); });
  }
}

inline BitMatrix multiply(const BitMatrix& lhs, const BitMatrix& rhs) {
  BitMatrix out(lhs.size());
  multiply(lhs, rhs, out);
  return out;
}

}  // namespace tscl
