#include "roar/bitset.hpp"

#include <algorithm>
#include <bit>

namespace roar {

PlainBitset PlainBitset::from_values(std::span<const std::uint32_t> values) {
  PlainBitset b;
  for (std::uint32_t v : values) b.set(v);
  return b;
}

void PlainBitset::ensure_words(std::size_t n) {
  if (n <= words_.size()) return;
  words_.resize(std::max(n, 2 * words_.size()), 0);
}

void PlainBitset::set(std::uint32_t x) {
  const std::size_t w = x >> 6;
  ensure_words(w + 1);
  words_[w] |= std::uint64_t{1} << (x & 63);
}

void PlainBitset::clear(std::uint32_t x) {
  const std::size_t w = x >> 6;
  if (w < words_.size()) words_[w] &= ~(std::uint64_t{1} << (x & 63));
}

bool PlainBitset::test(std::uint32_t x) const {
  const std::size_t w = x >> 6;
  return w < words_.size() && ((words_[w] >> (x & 63)) & 1);
}

void PlainBitset::trim() {
  std::size_t n = words_.size();
  while (n > 0 && words_[n - 1] == 0) --n;
  words_.resize(n);
  words_.shrink_to_fit();
}

std::uint64_t PlainBitset::cardinality() const {
  std::uint64_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

std::vector<std::uint32_t> PlainBitset::to_vector() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w != 0) {
      out.push_back(static_cast<std::uint32_t>(i * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

PlainBitset& PlainBitset::operator&=(const PlainBitset& other) {
  const std::size_t common = std::min(words_.size(), other.words_.size());
  for (std::size_t i = 0; i < common; ++i) words_[i] &= other.words_[i];
  std::fill(words_.begin() + static_cast<std::ptrdiff_t>(common), words_.end(), 0);
  return *this;
}

PlainBitset& PlainBitset::operator|=(const PlainBitset& other) {
  ensure_words(other.words_.size());
  for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

bool operator==(const PlainBitset& a, const PlainBitset& b) {
  const auto& small = a.words_.size() <= b.words_.size() ? a.words_ : b.words_;
  const auto& large = a.words_.size() <= b.words_.size() ? b.words_ : a.words_;
  return std::equal(small.begin(), small.end(), large.begin()) &&
         std::all_of(large.begin() + static_cast<std::ptrdiff_t>(small.size()), large.end(),
                     [](std::uint64_t w) { return w == 0; });
}

PlainBitset clone_and(const PlainBitset& a, const PlainBitset& b) {
  PlainBitset out = a;
  out &= b;
  return out;
}

PlainBitset clone_or(const PlainBitset& a, const PlainBitset& b) {
  PlainBitset out = a;
  out |= b;
  return out;
}

}  // namespace roar
