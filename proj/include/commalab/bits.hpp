#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace commalab {

// Fixed-length bit string packed into 64-bit words.  The length is chosen at
// construction and never changes; copying reuses the destination's storage, so
// assignments between equal-length vectors do not allocate.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(int n) : n_(n), words_((n + 63) / 64, 0) {}

  int size() const { return n_; }

  bool test(int i) const {
    assert(i >= 0 && i < n_);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(int i) {
    assert(i >= 0 && i < n_);
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

  void flip(int i) {
    assert(i >= 0 && i < n_);
    words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
  }

  void clear() {
    for (auto& w : words_) w = 0;
  }

  int count_ones() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  bool all_ones() const { return count_ones() == n_; }

  // Raw word access for bulk initialization.  After writing, callers must
  // mask the tail so bits past size() stay zero; mask_tail() does that.
  std::uint64_t* words() { return words_.data(); }
  const std::uint64_t* words() const { return words_.data(); }
  int word_count() const { return static_cast<int>(words_.size()); }

  void mask_tail() {
    int rem = n_ & 63;
    if (rem != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << rem) - 1;
    }
  }

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace commalab
