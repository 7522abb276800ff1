#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace circloop {

/// Fixed-width bitset with one bit per raw material. Unused high bits of the
/// last word are kept zero so word-wise comparison is exact.
class MaterialBitset {
 public:
  MaterialBitset() = default;

  explicit MaterialBitset(int bit_count)
      : bits_(bit_count), words_(static_cast<size_t>((bit_count + 63) / 64), 0) {
    if (bit_count < 0) throw std::invalid_argument("negative bitset width");
  }

  int bit_count() const { return bits_; }

  bool test(int i) const {
    check_index(i);
    return (words_[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1u;
  }

  void set(int i) {
    check_index(i);
    words_[static_cast<size_t>(i) >> 6] |= uint64_t{1} << (i & 63);
  }

  void reset() { std::fill(words_.begin(), words_.end(), uint64_t{0}); }

  int popcount() const {
    int n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
  }

  MaterialBitset& operator|=(const MaterialBitset& o) {
    check_width(o);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  /// Superset test: every bit of `o` is set here too.
  bool contains(const MaterialBitset& o) const {
    check_width(o);
    for (size_t i = 0; i < words_.size(); ++i)
      if ((words_[i] & o.words_[i]) != o.words_[i]) return false;
    return true;
  }

  const std::vector<uint64_t>& words() const { return words_; }

  /// Overwrites the words from a snapshot taken off an equal-width set.
  /// `src` must hold words().size() entries with the unused high bits zero.
  void restore_words(const uint64_t* src) { std::copy(src, src + words_.size(), words_.begin()); }

  std::string to_string() const {
    std::string s = "0b";
    for (int i = bits_ - 1; i >= 0; --i) s += test(i) ? '1' : '0';
    return s;
  }

  friend bool operator==(const MaterialBitset&, const MaterialBitset&) = default;

 private:
  void check_index(int i) const {
    if (i < 0 || i >= bits_) throw std::out_of_range("bit index out of range");
  }
  void check_width(const MaterialBitset& o) const {
    if (bits_ != o.bits_) throw std::invalid_argument("bitset width mismatch");
  }

  int bits_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace circloop
