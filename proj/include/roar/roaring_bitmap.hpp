#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roar/container.hpp"

namespace roar {

// A 32-bit value split into its chunk key (high 16 bits) and the low 16 bits
// stored inside that chunk's container.
struct UniverseValue {
  std::uint32_t v;

  constexpr std::uint16_t high() const { return static_cast<std::uint16_t>(v >> 16); }
  constexpr std::uint16_t low() const { return static_cast<std::uint16_t>(v & 0xFFFF); }
  static constexpr UniverseValue join(std::uint16_t high, std::uint16_t low) {
    return {(static_cast<std::uint32_t>(high) << 16) | low};
  }
};

// Thrown by RoaringBitmap::deserialize on a malformed byte stream.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t offset, const std::string& rule)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + rule), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::uint32_t kSerialMagic = 0x524F4152;  // "RAOR" little-endian

class RoaringBitmap {
 public:
  struct Entry {
    std::uint16_t key;
    Container container;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  RoaringBitmap() = default;

  // Values need not be sorted; duplicates collapse.
  static RoaringBitmap from_values(std::span<const std::uint32_t> values);
  // Faster path for strictly increasing input.
  static RoaringBitmap from_sorted(std::span<const std::uint32_t> values);

  bool contains(std::uint32_t x) const;
  void add(std::uint32_t x);
  void remove(std::uint32_t x);

  bool empty() const { return entries_.empty(); }
  std::uint64_t cardinality() const;
  // Number of members <= x.
  std::uint64_t rank(std::uint32_t x) const;
  // The (i+1)-smallest member; throws std::out_of_range if i >= cardinality().
  std::uint32_t select(std::uint64_t i) const;

  std::optional<std::uint32_t> minimum() const;
  std::optional<std::uint32_t> maximum() const;

  template <typename Emit>
  void for_each(Emit&& emit) const {
    for (const Entry& e : entries_) {
      for_each_value(e.container, static_cast<std::uint32_t>(e.key) << 16, emit);
    }
  }
  std::vector<std::uint32_t> to_vector() const;

  std::span<const Entry> entries() const { return entries_; }

  // Serialized size: 8-byte header plus, per container, 4 bytes of key and
  // cardinality and its payload (2 bytes per value, or 8192 for a bitmap).
  std::size_t size_in_bytes() const;
  // Currently allocated heap bytes, including unused capacity.
  std::size_t allocated_bytes() const;
  void trim();

  std::vector<std::uint8_t> serialize() const;
  static RoaringBitmap deserialize(std::span<const std::uint8_t> bytes);

  RoaringBitmap& operator|=(const RoaringBitmap& other);
  RoaringBitmap& operator&=(const RoaringBitmap& other);

  // Empty when every structural invariant holds.
  std::string violation() const;

  friend bool operator==(const RoaringBitmap&, const RoaringBitmap&) = default;

  friend RoaringBitmap operator|(const RoaringBitmap& a, const RoaringBitmap& b);
  friend RoaringBitmap operator&(const RoaringBitmap& a, const RoaringBitmap& b);

 private:
  friend RoaringBitmap roaring_or(const RoaringBitmap&, const RoaringBitmap&);
  friend RoaringBitmap roaring_and(const RoaringBitmap&, const RoaringBitmap&);
  friend void roaring_or_inplace(RoaringBitmap&, const RoaringBitmap&);
  friend RoaringBitmap multi_or(std::span<const RoaringBitmap* const>);

  std::vector<Entry>::iterator find_key(std::uint16_t key);
  std::vector<Entry>::const_iterator find_key(std::uint16_t key) const;

  std::vector<Entry> entries_;
};

RoaringBitmap roaring_or(const RoaringBitmap& a, const RoaringBitmap& b);
RoaringBitmap roaring_and(const RoaringBitmap& a, const RoaringBitmap& b);
void roaring_or_inplace(RoaringBitmap& a, const RoaringBitmap& b);

// Union of many bitmaps through a min-heap over container keys. Within a key
// group the largest container is cloned and the rest folded into it; bitmap
// accumulation skips per-step cardinality and recounts once per key.
RoaringBitmap multi_or(std::span<const RoaringBitmap* const> bitmaps);
RoaringBitmap multi_or(std::span<const RoaringBitmap> bitmaps);

}  // namespace roar
