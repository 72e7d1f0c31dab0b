#pragma once

// Per-chunk storage for the low 16 bits of a Roaring bitmap.
//
// A chunk holding at most kArrayMaxCardinality values is stored as a sorted
// array of uint16_t; a denser chunk is stored as a 2^16-bit bitmap with a
// cached population count. Every combining operation returns a normalized
// Container: array iff cardinality <= 4096. A result of cardinality zero is
// legal as a return value but must never be stored in a RoaringBitmap.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace roar {

inline constexpr int kArrayMaxCardinality = 4096;
inline constexpr std::size_t kBitmapWords = 1024;
inline constexpr int kChunkSize = 1 << 16;

class ArrayContainer {
 public:
  ArrayContainer() = default;
  explicit ArrayContainer(std::uint16_t value) : values_{value} {}

  // values must be strictly increasing
  static ArrayContainer from_sorted(std::vector<std::uint16_t> values);

  std::span<const std::uint16_t> values() const { return values_; }
  int cardinality() const { return static_cast<int>(values_.size()); }
  bool empty() const { return values_.empty(); }

  bool contains(std::uint16_t x) const;
  // Binary search then linear shift. Returns false if x was already present.
  bool insert(std::uint16_t x);
  bool erase(std::uint16_t x);

  std::size_t capacity() const { return values_.capacity(); }
  void shrink_to_fit() { values_.shrink_to_fit(); }

  friend bool operator==(const ArrayContainer&, const ArrayContainer&) = default;

 private:
  std::vector<std::uint16_t> values_;
};

class BitmapContainer {
 public:
  // All bits clear, cardinality 0. Only meaningful as a scratch value.
  BitmapContainer() : words_(kBitmapWords, 0) {}

  // Cardinality is recomputed from the words.
  static BitmapContainer from_words(std::span<const std::uint64_t, kBitmapWords> words);

  std::span<const std::uint64_t, kBitmapWords> words() const {
    return std::span<const std::uint64_t, kBitmapWords>(words_.data(), kBitmapWords);
  }
  int cardinality() const { return cardinality_; }

  bool test(std::uint16_t x) const { return (words_[x >> 6] >> (x & 63)) & 1; }
  // Both return true when the bit changed; the cardinality follows.
  bool set(std::uint16_t x);
  bool clear(std::uint16_t x);

  // Raw word access for bulk kernels that defer cardinality maintenance.
  // Callers must finish with recount() before the container is observed.
  std::uint64_t* raw_words() { return words_.data(); }
  void recount();

  friend bool operator==(const BitmapContainer& a, const BitmapContainer& b) {
    return a.cardinality_ == b.cardinality_ && a.words_ == b.words_;
  }

 private:
  friend BitmapContainer bitmap_or_bitmap(const BitmapContainer&, const BitmapContainer&);
  friend std::variant<ArrayContainer, BitmapContainer> bitmap_and_bitmap(
      const BitmapContainer&, const BitmapContainer&);
  friend BitmapContainer array_to_bitmap(const ArrayContainer&);
  friend BitmapContainer& bitmap_or_bitmap_inplace(BitmapContainer&, const BitmapContainer&);
  friend BitmapContainer& bitmap_or_array_inplace(BitmapContainer&, const ArrayContainer&);

  std::vector<std::uint64_t> words_;
  int cardinality_ = 0;
};

using Container = std::variant<ArrayContainer, BitmapContainer>;

enum class IntersectStrategy { kAuto, kMerge, kGallop };

// ----- membership and mutation -----

bool array_contains(const ArrayContainer& a, std::uint16_t x);
Container array_add(ArrayContainer a, std::uint16_t x);
Container array_remove(ArrayContainer a, std::uint16_t x);
BitmapContainer bitmap_set(BitmapContainer b, std::uint16_t x);
Container bitmap_clear(BitmapContainer b, std::uint16_t x);

// ----- conversion -----

// Appends base + i for every set bit i of w, in increasing order, using the
// lowest-set-bit isolation loop: t = w & -w; emit popcount(t - 1); w &= w - 1.
template <typename Emit>
inline void for_each_set_bit(std::uint64_t w, std::uint32_t base, Emit&& emit) {
  while (w != 0) {
    const std::uint64_t t = w & (~w + 1);
    emit(base + static_cast<std::uint32_t>(std::popcount(t - 1)));
    w &= w - 1;
  }
}
std::vector<std::uint32_t> extract_set_bits(std::uint64_t w, std::uint32_t base);

// Requires b.cardinality() <= 4096; throws std::logic_error otherwise.
ArrayContainer bitmap_to_array(const BitmapContainer& b);
BitmapContainer array_to_bitmap(const ArrayContainer& a);

// ----- binary operations -----

BitmapContainer bitmap_or_bitmap(const BitmapContainer& a, const BitmapContainer& b);
Container bitmap_and_bitmap(const BitmapContainer& a, const BitmapContainer& b);
ArrayContainer bitmap_and_array(const BitmapContainer& b, const ArrayContainer& a);
BitmapContainer bitmap_or_array(const BitmapContainer& b, const ArrayContainer& a);
Container array_or_array(const ArrayContainer& a, const ArrayContainer& b);
ArrayContainer array_and_array(const ArrayContainer& a, const ArrayContainer& b,
                               IntersectStrategy strategy = IntersectStrategy::kAuto);

// Smallest index >= start with f[index] >= target, or f.size() if none.
std::size_t gallop_search(std::span<const std::uint16_t> f, std::size_t start,
                          std::uint16_t target);

// True when array_and_array's automatic choice is galloping for these sizes.
bool prefers_gallop(std::size_t size_a, std::size_t size_b);

BitmapContainer& bitmap_or_bitmap_inplace(BitmapContainer& a, const BitmapContainer& b);
BitmapContainer& bitmap_or_array_inplace(BitmapContainer& b, const ArrayContainer& a);

// ----- queries -----

int container_rank(const Container& c, std::uint16_t x);
// Throws std::out_of_range unless 0 <= i < cardinality.
std::uint16_t container_select(const Container& c, int i);

// ----- kind-dispatching helpers -----

int cardinality(const Container& c);
bool contains(const Container& c, std::uint16_t x);
bool is_bitmap(const Container& c);
std::string_view kind_name(const Container& c);
Container container_or(const Container& a, const Container& b);
Container container_and(const Container& a, const Container& b);
void container_or_inplace(Container& a, const Container& b);

// Empty string when c satisfies its representation invariants (including the
// 4096 normalization and cached-cardinality soundness), else a description.
std::string container_violation(const Container& c);

template <typename Emit>
void for_each_value(const Container& c, std::uint32_t base, Emit&& emit) {
  if (const auto* a = std::get_if<ArrayContainer>(&c)) {
    for (std::uint16_t v : a->values()) emit(base + v);
  } else {
    const auto words = std::get<BitmapContainer>(c).words();
    for (std::size_t i = 0; i < kBitmapWords; ++i) {
      for_each_set_bit(words[i], base + static_cast<std::uint32_t>(i * 64), emit);
    }
  }
}

}  // namespace roar
