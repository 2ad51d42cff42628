#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace triadic {

// Fixed-capacity bitset used for adjacency rows.  Intersection popcounts
// and set-bit iteration are the hot operations.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t nbits)
      : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }

  std::size_t size() const { return nbits_; }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  std::size_t intersection_count(const Bitset& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & other.words_[i]);
    return c;
  }

  // Calls fn(index) for every set bit.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        fn(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  // Calls fn(index) for every bit set in both this and other.
  template <typename Fn>
  void for_each_common(const Bitset& other, Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i] & other.words_[i];
      while (w) {
        fn(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  // Calls fn(index) for every bit set in exactly one of this and other.
  template <typename Fn>
  void for_each_xor(const Bitset& other, Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i] ^ other.words_[i];
      while (w) {
        fn(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace triadic
