#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace expd {

// Fixed-length bit vector with the handful of word-parallel operations the
// counting kernels need (intersection counts, range popcounts, iteration).
class Bitset {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  Bitset() = default;
  explicit Bitset(std::size_t size, bool value = false)
      : size_(size), words_((size + kWordBits - 1) / kWordBits, value ? ~Word{0} : Word{0}) {
    trim();
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  const Word* data() const noexcept { return words_.data(); }

  bool test(std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & Word{1};
  }
  void set(std::size_t i) noexcept { words_[i / kWordBits] |= Word{1} << (i % kWordBits); }
  void reset(std::size_t i) noexcept { words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits)); }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool any() const noexcept {
    for (Word w : words_)
      if (w) return true;
    return false;
  }
  bool none() const noexcept { return !any(); }

  // |this ∩ other|; sizes must agree.
  std::size_t count_and(const Bitset& other) const noexcept {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_.size(); ++w)
      c += static_cast<std::size_t>(std::popcount(words_[w] & other.words_[w]));
    return c;
  }

  // |this ∩ a ∩ b|
  std::size_t count_and(const Bitset& a, const Bitset& b) const noexcept {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_.size(); ++w)
      c += static_cast<std::size_t>(std::popcount(words_[w] & a.words_[w] & b.words_[w]));
    return c;
  }

  // Number of set bits with index in [lo, hi).
  std::size_t count_range(std::size_t lo, std::size_t hi) const noexcept {
    if (lo >= hi) return 0;
    std::size_t c = 0;
    std::size_t wlo = lo / kWordBits;
    std::size_t whi = (hi - 1) / kWordBits;
    for (std::size_t w = wlo; w <= whi; ++w) {
      Word mask = ~Word{0};
      if (w == wlo) mask &= ~Word{0} << (lo % kWordBits);
      if (w == whi && hi % kWordBits != 0) mask &= ~Word{0} >> (kWordBits - hi % kWordBits);
      c += static_cast<std::size_t>(std::popcount(words_[w] & mask));
    }
    return c;
  }

  // True iff every bit of this is also set in other.
  bool is_subset_of(const Bitset& other) const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~other.words_[w]) return false;
    return true;
  }

  Bitset& operator&=(const Bitset& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  // this ∖ o
  Bitset& subtract(const Bitset& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
    return *this;
  }

  friend Bitset operator&(Bitset a, const Bitset& b) noexcept { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) noexcept { return a |= b; }
  friend bool operator==(const Bitset&, const Bitset&) = default;

  // Calls f(index) for every set bit in increasing order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      Word bits = words_[w];
      while (bits) {
        int b = std::countr_zero(bits);
        f(w * kWordBits + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  // Index of the first set bit at or after `from`, or size() if none.
  std::size_t find_next(std::size_t from) const noexcept {
    if (from >= size_) return size_;
    std::size_t w = from / kWordBits;
    Word bits = words_[w] & (~Word{0} << (from % kWordBits));
    while (true) {
      if (bits) return w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
      if (++w == words_.size()) return size_;
      bits = words_[w];
    }
  }

 private:
  void trim() noexcept {
    if (size_ % kWordBits != 0 && !words_.empty())
      words_.back() &= ~Word{0} >> (kWordBits - size_ % kWordBits);
  }

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

}  // namespace expd
