#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>

#include <boost/container/small_vector.hpp>

namespace jrtp {

// Fixed-size bit set over request indices. Up to 256 bits live inline, so
// labels of typical instances copy without touching the heap.
class RequestSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  RequestSet() = default;
  explicit RequestSet(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }

  bool test(std::size_t b) const { return (words_[b >> 6] >> (b & 63)) & 1u; }
  RequestSet& set(std::size_t b) {
    words_[b >> 6] |= Word{1} << (b & 63);
    return *this;
  }
  RequestSet& reset(std::size_t b) {
    words_[b >> 6] &= ~(Word{1} << (b & 63));
    return *this;
  }
  RequestSet& set() {
    std::fill(words_.begin(), words_.end(), ~Word{0});
    trim();
    return *this;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
  }
  bool any() const { return !none(); }

  std::size_t find_first() const { return scan(0); }
  std::size_t find_next(std::size_t b) const {
    const std::size_t from = b + 1;
    if (from >= bits_) return npos;
    const Word w = words_[from >> 6] & (~Word{0} << (from & 63));
    if (w) return (from & ~std::size_t{63}) + static_cast<std::size_t>(std::countr_zero(w));
    return scan((from >> 6) + 1);
  }

  bool is_subset_of(const RequestSet& other) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }

  friend bool operator==(const RequestSet& a, const RequestSet& b) {
    return a.bits_ == b.bits_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
  }

 private:
  std::size_t scan(std::size_t word) const {
    for (std::size_t k = word; k < words_.size(); ++k)
      if (words_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
    return npos;
  }
  void trim() {
    if (bits_ % 64 && !words_.empty()) words_.back() &= (Word{1} << (bits_ % 64)) - 1;
  }

  std::size_t bits_ = 0;
  boost::container::small_vector<Word, 4> words_;
};

}  // namespace jrtp
