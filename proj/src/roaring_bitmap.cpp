#include "roar/roaring_bitmap.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace roar {

namespace {

bool key_less(const RoaringBitmap::Entry& e, std::uint16_t key) { return e.key < key; }

std::size_t payload_bytes(const Container& c) {
  return is_bitmap(c) ? kBitmapWords * sizeof(std::uint64_t)
                      : 2 * static_cast<std::size_t>(cardinality(c));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(pos_, std::string("truncated stream: expected ") + std::to_string(n) +
                                  " bytes of " + what + ", " + std::to_string(remaining()) +
                                  " available");
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Construction and access

RoaringBitmap RoaringBitmap::from_values(std::span<const std::uint32_t> values) {
  std::vector<std::uint32_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return from_sorted(sorted);
}

RoaringBitmap RoaringBitmap::from_sorted(std::span<const std::uint32_t> values) {
  if (std::adjacent_find(values.begin(), values.end(), std::greater_equal<>()) != values.end()) {
    throw std::invalid_argument("from_sorted: input not strictly increasing");
  }
  RoaringBitmap r;
  std::size_t i = 0;
  while (i < values.size()) {
    const std::uint16_t key = UniverseValue{values[i]}.high();
    std::vector<std::uint16_t> lows;
    for (; i < values.size() && UniverseValue{values[i]}.high() == key; ++i) {
      lows.push_back(UniverseValue{values[i]}.low());
    }
    ArrayContainer a = ArrayContainer::from_sorted(std::move(lows));
    if (a.cardinality() > kArrayMaxCardinality) {
      r.entries_.push_back({key, array_to_bitmap(a)});
    } else {
      r.entries_.push_back({key, std::move(a)});
    }
  }
  return r;
}

std::vector<RoaringBitmap::Entry>::iterator RoaringBitmap::find_key(std::uint16_t key) {
  return std::lower_bound(entries_.begin(), entries_.end(), key, key_less);
}

std::vector<RoaringBitmap::Entry>::const_iterator RoaringBitmap::find_key(std::uint16_t key) const {
  return std::lower_bound(entries_.begin(), entries_.end(), key, key_less);
}

bool RoaringBitmap::contains(std::uint32_t x) const {
  const UniverseValue u{x};
  const auto it = find_key(u.high());
  return it != entries_.end() && it->key == u.high() && roar::contains(it->container, u.low());
}

void RoaringBitmap::add(std::uint32_t x) {
  const UniverseValue u{x};
  auto it = find_key(u.high());
  if (it == entries_.end() || it->key != u.high()) {
    entries_.insert(it, Entry{u.high(), ArrayContainer(u.low())});
    return;
  }
  if (auto* b = std::get_if<BitmapContainer>(&it->container)) {
    b->set(u.low());
  } else {
    it->container = array_add(std::move(std::get<ArrayContainer>(it->container)), u.low());
  }
}

void RoaringBitmap::remove(std::uint32_t x) {
  const UniverseValue u{x};
  auto it = find_key(u.high());
  if (it == entries_.end() || it->key != u.high()) return;
  if (auto* b = std::get_if<BitmapContainer>(&it->container)) {
    if (b->test(u.low())) it->container = bitmap_clear(std::move(*b), u.low());
    return;
  }
  auto& a = std::get<ArrayContainer>(it->container);
  a.erase(u.low());
  if (a.empty()) entries_.erase(it);
}

std::uint64_t RoaringBitmap::cardinality() const {
  std::uint64_t n = 0;
  for (const Entry& e : entries_) n += static_cast<std::uint64_t>(roar::cardinality(e.container));
  return n;
}

std::uint64_t RoaringBitmap::rank(std::uint32_t x) const {
  const UniverseValue u{x};
  std::uint64_t r = 0;
  for (const Entry& e : entries_) {
    if (e.key < u.high()) {
      r += static_cast<std::uint64_t>(roar::cardinality(e.container));
    } else {
      if (e.key == u.high()) r += static_cast<std::uint64_t>(container_rank(e.container, u.low()));
      break;
    }
  }
  return r;
}

std::uint32_t RoaringBitmap::select(std::uint64_t i) const {
  std::uint64_t remaining = i;
  for (const Entry& e : entries_) {
    const auto c = static_cast<std::uint64_t>(roar::cardinality(e.container));
    if (remaining < c) {
      return UniverseValue::join(e.key, container_select(e.container, static_cast<int>(remaining))).v;
    }
    remaining -= c;
  }
  throw std::out_of_range("select: index " + std::to_string(i) + " outside [0, " +
                          std::to_string(cardinality()) + ")");
}

std::optional<std::uint32_t> RoaringBitmap::minimum() const {
  if (entries_.empty()) return std::nullopt;
  return UniverseValue::join(entries_.front().key, container_select(entries_.front().container, 0)).v;
}

std::optional<std::uint32_t> RoaringBitmap::maximum() const {
  if (entries_.empty()) return std::nullopt;
  const Container& c = entries_.back().container;
  return UniverseValue::join(entries_.back().key, container_select(c, roar::cardinality(c) - 1)).v;
}

std::vector<std::uint32_t> RoaringBitmap::to_vector() const {
  std::vector<std::uint32_t> out;
  out.reserve(cardinality());
  for_each([&](std::uint32_t v) { out.push_back(v); });
  return out;
}

// ---------------------------------------------------------------------------
// Size accounting

std::size_t RoaringBitmap::size_in_bytes() const {
  std::size_t n = 8;
  for (const Entry& e : entries_) n += 4 + payload_bytes(e.container);
  return n;
}

std::size_t RoaringBitmap::allocated_bytes() const {
  std::size_t n = entries_.capacity() * sizeof(Entry);
  for (const Entry& e : entries_) {
    if (const auto* a = std::get_if<ArrayContainer>(&e.container)) {
      n += a->capacity() * sizeof(std::uint16_t);
    } else {
      n += kBitmapWords * sizeof(std::uint64_t);
    }
  }
  return n;
}

void RoaringBitmap::trim() {
  entries_.shrink_to_fit();
  for (Entry& e : entries_) {
    if (auto* a = std::get_if<ArrayContainer>(&e.container)) a->shrink_to_fit();
  }
}

// ---------------------------------------------------------------------------
// Serialization

std::vector<std::uint8_t> RoaringBitmap::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(size_in_bytes());
  put_u32(out, kSerialMagic);
  put_u32(out, static_cast<std::uint32_t>(entries_.size()));
  for (const Entry& e : entries_) {
    put_u16(out, e.key);
    put_u16(out, static_cast<std::uint16_t>(roar::cardinality(e.container) - 1));
    if (const auto* a = std::get_if<ArrayContainer>(&e.container)) {
      for (std::uint16_t v : a->values()) put_u16(out, v);
    } else {
      for (std::uint64_t w : std::get<BitmapContainer>(e.container).words()) put_u64(out, w);
    }
  }
  return out;
}

RoaringBitmap RoaringBitmap::deserialize(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const std::uint32_t magic = in.u32("magic");
  if (magic != kSerialMagic) throw FormatError(0, "bad magic number");
  const std::uint32_t count = in.u32("entry count");
  if (count > (1u << 16)) throw FormatError(4, "entry count exceeds 65536");

  RoaringBitmap r;
  r.entries_.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t entry_offset = in.offset();
    const std::uint16_t key = in.u16("key");
    if (!r.entries_.empty() && key <= r.entries_.back().key) {
      throw FormatError(entry_offset, "keys not strictly increasing");
    }
    const int card = in.u16("cardinality") + 1;
    const std::size_t payload_offset = in.offset();
    if (card <= kArrayMaxCardinality) {
      in.need(2 * static_cast<std::size_t>(card), "array payload");
      std::vector<std::uint16_t> values(card);
      for (int i = 0; i < card; ++i) {
        values[i] = in.u16("array value");
        if (i > 0 && values[i] <= values[i - 1]) {
          throw FormatError(payload_offset + 2 * i, "array values not strictly increasing");
        }
      }
      r.entries_.push_back({key, ArrayContainer::from_sorted(std::move(values))});
    } else {
      in.need(kBitmapWords * 8, "bitmap payload");
      std::array<std::uint64_t, kBitmapWords> words{};
      for (auto& w : words) w = in.u64("bitmap word");
      BitmapContainer b = BitmapContainer::from_words(words);
      if (b.cardinality() != card) {
        throw FormatError(payload_offset, "bitmap popcount " + std::to_string(b.cardinality()) +
                                              " does not match cardinality " + std::to_string(card));
      }
      r.entries_.push_back({key, std::move(b)});
    }
  }
  if (in.remaining() != 0) throw FormatError(in.offset(), "trailing bytes after last container");
  return r;
}

// ---------------------------------------------------------------------------
// Logical operations

RoaringBitmap roaring_or(const RoaringBitmap& a, const RoaringBitmap& b) {
  RoaringBitmap out;
  const auto& ea = a.entries_;
  const auto& eb = b.entries_;
  out.entries_.reserve(ea.size() + eb.size());
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].key == eb[j].key) {
      out.entries_.push_back({ea[i].key, container_or(ea[i].container, eb[j].container)});
      ++i;
      ++j;
    } else if (ea[i].key < eb[j].key) {
      out.entries_.push_back(ea[i++]);
    } else {
      out.entries_.push_back(eb[j++]);
    }
  }
  out.entries_.insert(out.entries_.end(), ea.begin() + i, ea.end());
  out.entries_.insert(out.entries_.end(), eb.begin() + j, eb.end());
  return out;
}

RoaringBitmap roaring_and(const RoaringBitmap& a, const RoaringBitmap& b) {
  RoaringBitmap out;
  const auto& ea = a.entries_;
  const auto& eb = b.entries_;
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].key == eb[j].key) {
      Container c = container_and(ea[i].container, eb[j].container);
      if (cardinality(c) > 0) out.entries_.push_back({ea[i].key, std::move(c)});
      ++i;
      ++j;
    } else if (ea[i].key < eb[j].key) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

void roaring_or_inplace(RoaringBitmap& a, const RoaringBitmap& b) {
  if (b.entries_.empty()) return;
  std::vector<RoaringBitmap::Entry> merged;
  merged.reserve(a.entries_.size() + b.entries_.size());
  auto& ea = a.entries_;
  const auto& eb = b.entries_;
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].key == eb[j].key) {
      container_or_inplace(ea[i].container, eb[j].container);
      merged.push_back(std::move(ea[i]));
      ++i;
      ++j;
    } else if (ea[i].key < eb[j].key) {
      merged.push_back(std::move(ea[i++]));
    } else {
      merged.push_back(eb[j++]);
    }
  }
  for (; i < ea.size(); ++i) merged.push_back(std::move(ea[i]));
  merged.insert(merged.end(), eb.begin() + j, eb.end());
  ea = std::move(merged);
}

RoaringBitmap& RoaringBitmap::operator|=(const RoaringBitmap& other) {
  roaring_or_inplace(*this, other);
  return *this;
}

RoaringBitmap& RoaringBitmap::operator&=(const RoaringBitmap& other) {
  *this = roaring_and(*this, other);
  return *this;
}

RoaringBitmap operator|(const RoaringBitmap& a, const RoaringBitmap& b) { return roaring_or(a, b); }
RoaringBitmap operator&(const RoaringBitmap& a, const RoaringBitmap& b) { return roaring_and(a, b); }

RoaringBitmap multi_or(std::span<const RoaringBitmap* const> bitmaps) {
  struct Cursor {
    std::uint16_t key;
    std::size_t bitmap;
    std::size_t entry;
  };
  const auto later = [](const Cursor& x, const Cursor& y) { return x.key > y.key; };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
  for (std::size_t i = 0; i < bitmaps.size(); ++i) {
    if (!bitmaps[i]->entries_.empty()) heap.push({bitmaps[i]->entries_[0].key, i, 0});
  }

  RoaringBitmap out;
  std::vector<const Container*> group;
  while (!heap.empty()) {
    const std::uint16_t key = heap.top().key;
    group.clear();
    while (!heap.empty() && heap.top().key == key) {
      const Cursor c = heap.top();
      heap.pop();
      const auto& entries = bitmaps[c.bitmap]->entries_;
      group.push_back(&entries[c.entry].container);
      if (c.entry + 1 < entries.size()) heap.push({entries[c.entry + 1].key, c.bitmap, c.entry + 1});
    }
    std::sort(group.begin(), group.end(), [](const Container* x, const Container* y) {
      return cardinality(*x) > cardinality(*y);
    });

    Container acc = *group.front();
    bool stale = false;
    for (std::size_t k = 1; k < group.size(); ++k) {
      const Container& next = *group[k];
      if (auto* b = std::get_if<BitmapContainer>(&acc)) {
        std::uint64_t* words = b->raw_words();
        if (const auto* nb = std::get_if<BitmapContainer>(&next)) {
          const auto src = nb->words();
          for (std::size_t w = 0; w < kBitmapWords; ++w) words[w] |= src[w];
        } else {
          for (std::uint16_t v : std::get<ArrayContainer>(next).values()) {
            words[v >> 6] |= std::uint64_t{1} << (v & 63);
          }
        }
        stale = true;
      } else {
        // Sorted by descending cardinality, so next is an array too.
        acc = array_or_array(std::get<ArrayContainer>(acc), std::get<ArrayContainer>(next));
      }
    }
    if (stale) std::get<BitmapContainer>(acc).recount();
    out.entries_.push_back({key, std::move(acc)});
  }
  return out;
}

RoaringBitmap multi_or(std::span<const RoaringBitmap> bitmaps) {
  std::vector<const RoaringBitmap*> ptrs;
  ptrs.reserve(bitmaps.size());
  for (const auto& b : bitmaps) ptrs.push_back(&b);
  return multi_or(std::span<const RoaringBitmap* const>(ptrs));
}

// ---------------------------------------------------------------------------
// Audit

std::string RoaringBitmap::violation() const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (i > 0 && entries_[i - 1].key >= e.key) {
      return "keys not strictly increasing at entry " + std::to_string(i);
    }
    if (roar::cardinality(e.container) == 0) {
      return "empty container under key " + std::to_string(e.key);
    }
    if (std::string v = container_violation(e.container); !v.empty()) {
      return "key " + std::to_string(e.key) + ": " + v;
    }
  }
  return {};
}

}  // namespace roar
