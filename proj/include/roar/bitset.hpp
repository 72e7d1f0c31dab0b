#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace roar {

// Uncompressed growable bitset. Storage grows by doubling, like
// java.util.BitSet, so an untrimmed bitset over-allocates by up to 2x.
class PlainBitset {
 public:
  PlainBitset() = default;

  static PlainBitset from_values(std::span<const std::uint32_t> values);

  void set(std::uint32_t x);
  void clear(std::uint32_t x);
  bool test(std::uint32_t x) const;

  // Words currently allocated.
  std::size_t capacity_words() const { return words_.size(); }
  std::size_t size_in_bytes() const { return words_.size() * sizeof(std::uint64_t); }
  // Shrinks the allocation to the highest non-zero word.
  void trim();

  std::uint64_t cardinality() const;
  std::vector<std::uint32_t> to_vector() const;
  std::span<const std::uint64_t> words() const { return words_; }

  PlainBitset& operator&=(const PlainBitset& other);
  PlainBitset& operator|=(const PlainBitset& other);

  // Logical equality: trailing zero words are ignored.
  friend bool operator==(const PlainBitset& a, const PlainBitset& b);

 private:
  void ensure_words(std::size_t n);

  std::vector<std::uint64_t> words_;
};

PlainBitset clone_and(const PlainBitset& a, const PlainBitset& b);
PlainBitset clone_or(const PlainBitset& a, const PlainBitset& b);

}  // namespace roar
