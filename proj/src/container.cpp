#include "roar/container.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace roar {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t bit_of(std::uint16_t x) { return std::uint64_t{1} << (x & 63); }

}  // namespace

// ---------------------------------------------------------------------------
// ArrayContainer

ArrayContainer ArrayContainer::from_sorted(std::vector<std::uint16_t> values) {
  if (std::adjacent_find(values.begin(), values.end(),
                         [](std::uint16_t a, std::uint16_t b) { return a >= b; }) != values.end()) {
    throw std::invalid_argument("array container values must be strictly increasing");
  }
  ArrayContainer a;
  a.values_ = std::move(values);
  return a;
}

bool ArrayContainer::contains(std::uint16_t x) const {
  return std::binary_search(values_.begin(), values_.end(), x);
}

bool ArrayContainer::insert(std::uint16_t x) {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it != values_.end() && *it == x) return false;
  values_.insert(it, x);
  return true;
}

bool ArrayContainer::erase(std::uint16_t x) {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it == values_.end() || *it != x) return false;
  values_.erase(it);
  return true;
}

// ---------------------------------------------------------------------------
// BitmapContainer

BitmapContainer BitmapContainer::from_words(std::span<const std::uint64_t, kBitmapWords> words) {
  BitmapContainer b;
  std::copy(words.begin(), words.end(), b.words_.begin());
  b.recount();
  return b;
}

bool BitmapContainer::set(std::uint16_t x) {
  std::uint64_t& w = words_[x >> 6];
  const std::uint64_t before = w;
  w |= bit_of(x);
  const bool changed = w != before;
  cardinality_ += changed;
  return changed;
}

bool BitmapContainer::clear(std::uint16_t x) {
  std::uint64_t& w = words_[x >> 6];
  const std::uint64_t before = w;
  w &= ~bit_of(x);
  const bool changed = w != before;
  cardinality_ -= changed;
  return changed;
}

void BitmapContainer::recount() {
  int c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  cardinality_ = c;
}

// ---------------------------------------------------------------------------
// Membership and mutation

bool array_contains(const ArrayContainer& a, std::uint16_t x) { return a.contains(x); }

Container array_add(ArrayContainer a, std::uint16_t x) {
  if (a.cardinality() < kArrayMaxCardinality || a.contains(x)) {
    a.insert(x);
    return a;
  }
  BitmapContainer b = array_to_bitmap(a);
  b.set(x);
  return b;
}

Container array_remove(ArrayContainer a, std::uint16_t x) {
  a.erase(x);
  return a;
}

BitmapContainer bitmap_set(BitmapContainer b, std::uint16_t x) {
  b.set(x);
  return b;
}

Container bitmap_clear(BitmapContainer b, std::uint16_t x) {
  if (b.clear(x) && b.cardinality() <= kArrayMaxCardinality) return bitmap_to_array(b);
  return b;
}

// ---------------------------------------------------------------------------
// Conversion

std::vector<std::uint32_t> extract_set_bits(std::uint64_t w, std::uint32_t base) {
  std::vector<std::uint32_t> out;
  out.reserve(std::popcount(w));
  for_each_set_bit(w, base, [&](std::uint32_t v) { out.push_back(v); });
  return out;
}

ArrayContainer bitmap_to_array(const BitmapContainer& b) {
  if (b.cardinality() > kArrayMaxCardinality) {
    throw std::logic_error("bitmap_to_array: cardinality " + std::to_string(b.cardinality()) +
                           " exceeds " + std::to_string(kArrayMaxCardinality));
  }
  std::vector<std::uint16_t> values;
  values.reserve(b.cardinality());
  const auto words = b.words();
  for (std::size_t i = 0; i < kBitmapWords; ++i) {
    for_each_set_bit(words[i], static_cast<std::uint32_t>(i * 64),
                     [&](std::uint32_t v) { values.push_back(static_cast<std::uint16_t>(v)); });
  }
  return ArrayContainer::from_sorted(std::move(values));
}

BitmapContainer array_to_bitmap(const ArrayContainer& a) {
  BitmapContainer b;
  for (std::uint16_t v : a.values()) b.words_[v >> 6] |= bit_of(v);
  b.cardinality_ = a.cardinality();
  return b;
}

// ---------------------------------------------------------------------------
// Bitmap vs bitmap

BitmapContainer bitmap_or_bitmap(const BitmapContainer& a, const BitmapContainer& b) {
  BitmapContainer out;
  int c = 0;
  for (std::size_t i = 0; i < kBitmapWords; ++i) {
    const std::uint64_t w = a.words_[i] | b.words_[i];
    out.words_[i] = w;
    c += std::popcount(w);
  }
  out.cardinality_ = c;
  return out;
}

Container bitmap_and_bitmap(const BitmapContainer& a, const BitmapContainer& b) {
  int c = 0;
  for (std::size_t i = 0; i < kBitmapWords; ++i) c += std::popcount(a.words_[i] & b.words_[i]);

  if (c > kArrayMaxCardinality) {
    BitmapContainer out;
    for (std::size_t i = 0; i < kBitmapWords; ++i) out.words_[i] = a.words_[i] & b.words_[i];
    out.cardinality_ = c;
    return out;
  }
  std::vector<std::uint16_t> values;
  values.reserve(c);
  for (std::size_t i = 0; i < kBitmapWords; ++i) {
    for_each_set_bit(a.words_[i] & b.words_[i], static_cast<std::uint32_t>(i * 64),
                     [&](std::uint32_t v) { values.push_back(static_cast<std::uint16_t>(v)); });
  }
  return ArrayContainer::from_sorted(std::move(values));
}

BitmapContainer& bitmap_or_bitmap_inplace(BitmapContainer& a, const BitmapContainer& b) {
  int c = 0;
  for (std::size_t i = 0; i < kBitmapWords; ++i) {
    a.words_[i] |= b.words_[i];
    c += std::popcount(a.words_[i]);
  }
  a.cardinality_ = c;
  return a;
}

// ---------------------------------------------------------------------------
// Bitmap vs array

ArrayContainer bitmap_and_array(const BitmapContainer& b, const ArrayContainer& a) {
  std::vector<std::uint16_t> values;
  values.reserve(a.cardinality());
  for (std::uint16_t v : a.values()) {
    if (b.test(v)) values.push_back(v);
  }
  return ArrayContainer::from_sorted(std::move(values));
}

BitmapContainer bitmap_or_array(const BitmapContainer& b, const ArrayContainer& a) {
  BitmapContainer out = b;
  for (std::uint16_t v : a.values()) out.set(v);
  return out;
}

BitmapContainer& bitmap_or_array_inplace(BitmapContainer& b, const ArrayContainer& a) {
  for (std::uint16_t v : a.values()) {
    std::uint64_t& w = b.words_[v >> 6];
    const std::uint64_t before = w;
    w |= bit_of(v);
    b.cardinality_ += (w != before);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Array vs array

Container array_or_array(const ArrayContainer& a, const ArrayContainer& b) {
  const auto av = a.values();
  const auto bv = b.values();
  if (av.size() + bv.size() <= static_cast<std::size_t>(kArrayMaxCardinality)) {
    std::vector<std::uint16_t> out;
    out.reserve(av.size() + bv.size());
    std::set_union(av.begin(), av.end(), bv.begin(), bv.end(), std::back_inserter(out));
    return ArrayContainer::from_sorted(std::move(out));
  }
  BitmapContainer scratch;
  std::uint64_t* words = scratch.raw_words();
  for (std::uint16_t v : av) words[v >> 6] |= bit_of(v);
  for (std::uint16_t v : bv) words[v >> 6] |= bit_of(v);
  scratch.recount();
  if (scratch.cardinality() <= kArrayMaxCardinality) return bitmap_to_array(scratch);
  return scratch;
}

bool prefers_gallop(std::size_t size_a, std::size_t size_b) {
  const std::size_t small = std::min(size_a, size_b);
  const std::size_t large = std::max(size_a, size_b);
  return large >= 64 * small;
}

std::size_t gallop_search(std::span<const std::uint16_t> f, std::size_t start,
                          std::uint16_t target) {
  const std::size_t n = f.size();
  if (start >= n) return n;
  if (f[start] >= target) return start;

  // f[start + span / 2] < target holds throughout.
  std::size_t span = 1;
  while (start + span < n && f[start + span] < target) span <<= 1;
  const std::size_t lo = start + span / 2 + 1;
  const std::size_t hi = std::min(start + span, n);
  return static_cast<std::size_t>(
      std::lower_bound(f.begin() + static_cast<std::ptrdiff_t>(lo),
                       f.begin() + static_cast<std::ptrdiff_t>(hi), target) -
      f.begin());
}

namespace {

std::vector<std::uint16_t> merge_intersect(std::span<const std::uint16_t> a,
                                           std::span<const std::uint16_t> b) {
  // Branch-free: on random inputs the three-way compare mispredicts half the time.
  std::vector<std::uint16_t> out(std::min(a.size(), b.size()) + 1);
  std::size_t i = 0, j = 0, k = 0;
  while (i < a.size() && j < b.size()) {
    const std::uint16_t x = a[i];
    const std::uint16_t y = b[j];
    out[k] = x;
    k += x == y;
    i += x <= y;
    j += y <= x;
  }
  out.resize(k);
  return out;
}

std::vector<std::uint16_t> gallop_intersect(std::span<const std::uint16_t> small,
                                            std::span<const std::uint16_t> large) {
  std::vector<std::uint16_t> out;
  out.reserve(small.size());
  std::size_t j = 0;
  for (std::uint16_t r : small) {
    j = gallop_search(large, j, r);
    if (j == large.size()) break;
    if (large[j] == r) {
      out.push_back(r);
      ++j;
    }
  }
  return out;
}

}  // namespace

ArrayContainer array_and_array(const ArrayContainer& a, const ArrayContainer& b,
                               IntersectStrategy strategy) {
  auto av = a.values();
  auto bv = b.values();
  if (strategy == IntersectStrategy::kAuto) {
    strategy = prefers_gallop(av.size(), bv.size()) ? IntersectStrategy::kGallop
                                                    : IntersectStrategy::kMerge;
  }
  if (strategy == IntersectStrategy::kMerge) {
    return ArrayContainer::from_sorted(merge_intersect(av, bv));
  }
  if (av.size() > bv.size()) std::swap(av, bv);
  return ArrayContainer::from_sorted(gallop_intersect(av, bv));
}

// ---------------------------------------------------------------------------
// Rank / select

int container_rank(const Container& c, std::uint16_t x) {
  return std::visit(
      overloaded{
          [x](const ArrayContainer& a) {
            const auto v = a.values();
            return static_cast<int>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
          },
          [x](const BitmapContainer& b) {
            const auto words = b.words();
            const std::size_t last = x >> 6;
            int r = 0;
            for (std::size_t i = 0; i < last; ++i) r += std::popcount(words[i]);
            const unsigned shift = 63 - (x & 63);
            return r + std::popcount(words[last] << shift);
          }},
      c);
}

std::uint16_t container_select(const Container& c, int i) {
  if (i < 0 || i >= cardinality(c)) {
    throw std::out_of_range("container_select: index " + std::to_string(i) +
                            " outside [0, " + std::to_string(cardinality(c)) + ")");
  }
  return std::visit(overloaded{[i](const ArrayContainer& a) { return a.values()[i]; },
                               [i](const BitmapContainer& b) {
                                 const auto words = b.words();
                                 int remaining = i;
                                 std::size_t w = 0;
                                 for (;; ++w) {
                                   const int pc = std::popcount(words[w]);
                                   if (remaining < pc) break;
                                   remaining -= pc;
                                 }
                                 std::uint64_t word = words[w];
                                 for (int k = 0; k < remaining; ++k) word &= word - 1;
                                 return static_cast<std::uint16_t>(w * 64 +
                                                                   std::countr_zero(word));
                               }},
                    c);
}

// ---------------------------------------------------------------------------
// Dispatch

int cardinality(const Container& c) {
  return std::visit([](const auto& x) { return x.cardinality(); }, c);
}

bool contains(const Container& c, std::uint16_t x) {
  return std::visit(overloaded{[x](const ArrayContainer& a) { return a.contains(x); },
                               [x](const BitmapContainer& b) { return b.test(x); }},
                    c);
}

bool is_bitmap(const Container& c) { return std::holds_alternative<BitmapContainer>(c); }

std::string_view kind_name(const Container& c) { return is_bitmap(c) ? "bitmap" : "array"; }

Container container_or(const Container& a, const Container& b) {
  return std::visit(
      overloaded{
          [](const ArrayContainer& x, const ArrayContainer& y) { return array_or_array(x, y); },
          [](const ArrayContainer& x, const BitmapContainer& y) -> Container {
            return bitmap_or_array(y, x);
          },
          [](const BitmapContainer& x, const ArrayContainer& y) -> Container {
            return bitmap_or_array(x, y);
          },
          [](const BitmapContainer& x, const BitmapContainer& y) -> Container {
            return bitmap_or_bitmap(x, y);
          }},
      a, b);
}

Container container_and(const Container& a, const Container& b) {
  return std::visit(
      overloaded{[](const ArrayContainer& x, const ArrayContainer& y) -> Container {
                   return array_and_array(x, y);
                 },
                 [](const ArrayContainer& x, const BitmapContainer& y) -> Container {
                   return bitmap_and_array(y, x);
                 },
                 [](const BitmapContainer& x, const ArrayContainer& y) -> Container {
                   return bitmap_and_array(x, y);
                 },
                 [](const BitmapContainer& x, const BitmapContainer& y) {
                   return bitmap_and_bitmap(x, y);
                 }},
      a, b);
}

void container_or_inplace(Container& a, const Container& b) {
  if (auto* ab = std::get_if<BitmapContainer>(&a)) {
    if (const auto* bb = std::get_if<BitmapContainer>(&b)) {
      bitmap_or_bitmap_inplace(*ab, *bb);
    } else {
      bitmap_or_array_inplace(*ab, std::get<ArrayContainer>(b));
    }
    return;
  }
  const auto& aa = std::get<ArrayContainer>(a);
  if (const auto* bb = std::get_if<BitmapContainer>(&b)) {
    a = bitmap_or_array(*bb, aa);
  } else {
    a = array_or_array(aa, std::get<ArrayContainer>(b));
  }
}

std::string container_violation(const Container& c) {
  if (const auto* a = std::get_if<ArrayContainer>(&c)) {
    const auto v = a->values();
    if (v.size() > static_cast<std::size_t>(kArrayMaxCardinality)) {
      return "array container holds " + std::to_string(v.size()) + " values";
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i - 1] >= v[i]) return "array container not strictly increasing at " + std::to_string(i);
    }
    return {};
  }
  const auto& b = std::get<BitmapContainer>(c);
  int recount = 0;
  for (std::uint64_t w : b.words()) recount += std::popcount(w);
  if (recount != b.cardinality()) {
    return "bitmap cardinality " + std::to_string(b.cardinality()) + " but " +
           std::to_string(recount) + " bits set";
  }
  if (b.cardinality() <= kArrayMaxCardinality) {
    return "bitmap container with cardinality " + std::to_string(b.cardinality());
  }
  return {};
}

}  // namespace roar
