#pragma once

#include <cstdint>
#include <vector>

#include "triadic/common.hpp"

namespace triadic {

// Open-addressing hash map from 64-bit keys to 32-bit values, tuned for
// the registry's churn.  Keys 0 and ~0 are reserved as the empty and
// tombstone markers; packed triple and edge keys never take either value.
class FlatMap {
 public:
  FlatMap() { rehash(16); }

  std::size_t size() const { return size_; }

  std::uint32_t* find(std::uint64_t key) {
    std::size_t i = probe_start(key);
    for (;;) {
      Slot& s = slots_[i];
      if (s.key == key) return &s.val;
      if (s.key == kEmpty) return nullptr;
      i = (i + 1) & mask_;
    }
  }
  const std::uint32_t* find(std::uint64_t key) const {
    return const_cast<FlatMap*>(this)->find(key);
  }

  // Inserts a fresh key; the caller guarantees it is absent.
  void insert(std::uint64_t key, std::uint32_t val) {
    if ((used_ + 1) * 10 >= slots_.size() * 7) grow();
    std::size_t i = probe_start(key);
    while (slots_[i].key != kEmpty && slots_[i].key != kTomb)
      i = (i + 1) & mask_;
    if (slots_[i].key == kEmpty) ++used_;
    slots_[i] = Slot{key, val};
    ++size_;
  }

  void bump(std::uint64_t key) {
    if (std::uint32_t* v = find(key))
      ++*v;
    else
      insert(key, 1);
  }

  bool erase(std::uint64_t key) {
    std::size_t i = probe_start(key);
    for (;;) {
      Slot& s = slots_[i];
      if (s.key == key) {
        s.key = kTomb;
        --size_;
        return true;
      }
      if (s.key == kEmpty) return false;
      i = (i + 1) & mask_;
    }
  }

  void reserve(std::size_t n) {
    std::size_t target = 16;
    while (target * 7 < n * 10) target <<= 1;
    if (target > slots_.size()) rehash(target);
  }

  void clear() {
    size_ = used_ = 0;
    slots_.assign(16, Slot{kEmpty, 0});
    slots_.shrink_to_fit();
    mask_ = 15;
  }

 private:
  static constexpr std::uint64_t kEmpty = 0;
  static constexpr std::uint64_t kTomb = ~0ULL;

  struct Slot {
    std::uint64_t key = kEmpty;
    std::uint32_t val = 0;
  };

  std::size_t probe_start(std::uint64_t key) const {
    return static_cast<std::size_t>(splitmix64(key)) & mask_;
  }

  void grow() {
    // Rehash in place size when tombstones dominate, else double.
    rehash(size_ * 10 >= slots_.size() * 4 ? slots_.size() * 2
                                           : slots_.size());
  }

  void rehash(std::size_t capacity) {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(capacity, Slot{kEmpty, 0});
    mask_ = capacity - 1;
    used_ = size_;
    for (const Slot& s : old) {
      if (s.key == kEmpty || s.key == kTomb) continue;
      std::size_t i = probe_start(s.key);
      while (slots_[i].key != kEmpty) i = (i + 1) & mask_;
      slots_[i] = s;
    }
  }

  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
  std::size_t used_ = 0;  // live slots plus tombstones
};

}  // namespace triadic
