#pragma once

// Word-aligned run-length encoded bitmaps with 32-bit words.
//
// The bit space is cut into 31-bit segments. A literal word has its most
// significant bit clear and carries one segment verbatim in bits 0..30. A
// fill word has the most significant bit set, bit 30 holding the fill value,
// and encodes a run of homogeneous segments:
//
//   WAH      bits 0..29   run length n >= 1
//   Concise  bits 25..29  position p; bits 0..24 run length r
//            p == 0: r + 1 fill segments
//            p != 0: one segment equal to the fill with bit p-1 flipped,
//                    followed by r fill segments
//
// Bit k of the set lives in segment k / 31 at bit k % 31. Encodings are
// canonical: no literal is all zeros or all ones, a Concise literal never has
// a single bit differing from a fill (those become p != 0 fills), and
// adjacent same-value fills only appear when the first one is full.
// Encoding a set S covers ceil((max(S)+1)/31) segments unless a longer bit
// length is requested; the segment count is part of the value.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace roar {

enum class RleFormat { kWah, kConcise };

class RleFormatError : public std::runtime_error {
 public:
  RleFormatError(std::size_t word, const std::string& rule)
      : std::runtime_error("word " + std::to_string(word) + ": " + rule), word_(word) {}
  std::size_t word_index() const { return word_; }

 private:
  std::size_t word_;
};

inline constexpr int kSegmentBits = 31;

template <RleFormat F>
class RleBitmap {
 public:
  RleBitmap() = default;

  // values sorted and duplicate-free. min_bits extends the covered range with
  // trailing zero segments.
  static RleBitmap encode(std::span<const std::uint32_t> values, std::uint64_t min_bits = 0);
  // Validates that the words form a canonical encoding; throws RleFormatError.
  static RleBitmap from_words(std::vector<std::uint32_t> words);

  std::span<const std::uint32_t> words() const { return words_; }
  std::uint64_t size_bits() const { return 32 * static_cast<std::uint64_t>(words_.size()); }
  std::uint64_t segment_count() const { return segments_; }
  bool empty() const { return words_.empty(); }

  std::uint64_t cardinality() const;
  std::vector<std::uint32_t> decode() const;
  // Linear scan over the words.
  bool contains(std::uint32_t x) const;

  // Extends the encoding with x, which must exceed every member.
  void append(std::uint32_t x);
  // Any x: appends past the maximum, otherwise decodes, inserts and
  // re-encodes over the same bit length.
  void add(std::uint32_t x);
  // Decodes, drops x and re-encodes over the same bit length.
  void remove(std::uint32_t x);

  friend bool operator==(const RleBitmap&, const RleBitmap&) = default;

 private:
  template <RleFormat G, typename Op>
  friend RleBitmap<G> rle_merge(const RleBitmap<G>&, const RleBitmap<G>&, Op);

  std::vector<std::uint32_t> words_;
  std::uint64_t segments_ = 0;
};

using WahBitmap = RleBitmap<RleFormat::kWah>;
using ConciseBitmap = RleBitmap<RleFormat::kConcise>;

extern template class RleBitmap<RleFormat::kWah>;
extern template class RleBitmap<RleFormat::kConcise>;

// Word-at-a-time merges: runs are consumed in lockstep, absorbing fills
// (zeros for AND, ones for OR) skip the other operand, and every emitted
// segment passes through the canonicalizing writer. The result covers
// max(a.segment_count(), b.segment_count()) segments.
template <RleFormat F>
RleBitmap<F> rle_and(const RleBitmap<F>& a, const RleBitmap<F>& b);
template <RleFormat F>
RleBitmap<F> rle_or(const RleBitmap<F>& a, const RleBitmap<F>& b);

template <RleFormat F>
std::uint64_t rle_size_bits(const RleBitmap<F>& b) {
  return b.size_bits();
}

inline WahBitmap wah_encode(std::span<const std::uint32_t> values) {
  return WahBitmap::encode(values);
}
inline ConciseBitmap concise_encode(std::span<const std::uint32_t> values) {
  return ConciseBitmap::encode(values);
}
std::vector<std::uint32_t> wah_decode(std::span<const std::uint32_t> words);
std::vector<std::uint32_t> concise_decode(std::span<const std::uint32_t> words);

WahBitmap wah_and(const WahBitmap& a, const WahBitmap& b);
WahBitmap wah_or(const WahBitmap& a, const WahBitmap& b);
ConciseBitmap concise_and(const ConciseBitmap& a, const ConciseBitmap& b);
ConciseBitmap concise_or(const ConciseBitmap& a, const ConciseBitmap& b);

}  // namespace roar
