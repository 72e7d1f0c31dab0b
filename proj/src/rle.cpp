#include "roar/rle.hpp"

#include <algorithm>
#include <bit>

namespace roar {

namespace {

constexpr std::uint32_t kPayloadMask = 0x7FFFFFFFu;
constexpr std::uint32_t kFillFlag = 0x80000000u;
constexpr std::uint32_t kFillValueBit = 0x40000000u;

constexpr std::uint64_t kWahMaxRun = (std::uint64_t{1} << 30) - 1;
constexpr std::uint32_t kConciseMaxR = (1u << 25) - 1;
constexpr std::uint32_t kConciseRMask = (1u << 25) - 1;
constexpr int kConcisePosShift = 25;

// Enough segments to cover every 32-bit position.
constexpr std::uint64_t kMaxSegments = ((std::uint64_t{1} << 32) + kSegmentBits - 1) / kSegmentBits;

constexpr bool is_fill(std::uint32_t w) { return (w & kFillFlag) != 0; }
constexpr bool fill_value(std::uint32_t w) { return (w & kFillValueBit) != 0; }
constexpr std::uint32_t fill_payload(bool v) { return v ? kPayloadMask : 0; }

// Concise helpers
constexpr std::uint32_t concise_pos(std::uint32_t w) { return (w >> kConcisePosShift) & 31; }
constexpr std::uint32_t concise_r(std::uint32_t w) { return w & kConciseRMask; }
constexpr std::uint32_t concise_fill(bool v, std::uint32_t p, std::uint32_t r) {
  return kFillFlag | (v ? kFillValueBit : 0) | (p << kConcisePosShift) | r;
}

template <RleFormat F>
std::uint64_t word_segments(std::uint32_t w) {
  if (!is_fill(w)) return 1;
  if constexpr (F == RleFormat::kWah) {
    return w & (kFillValueBit - 1);
  } else {
    return std::uint64_t{concise_r(w)} + 1;
  }
}

// A homogeneous run or a single literal segment.
struct Run {
  bool fill;
  bool value;
  std::uint32_t literal;
  std::uint64_t count;

  std::uint32_t payload() const { return fill ? fill_payload(value) : literal; }
};

// Splits one word into at most two runs.
template <RleFormat F>
int split_word(std::uint32_t w, Run out[2]) {
  if (!is_fill(w)) {
    out[0] = {false, false, w & kPayloadMask, 1};
    return 1;
  }
  const bool v = fill_value(w);
  if constexpr (F == RleFormat::kWah) {
    out[0] = {true, v, 0, w & (kFillValueBit - 1)};
    return 1;
  } else {
    const std::uint32_t p = concise_pos(w);
    const std::uint32_t r = concise_r(w);
    if (p == 0) {
      out[0] = {true, v, 0, std::uint64_t{r} + 1};
      return 1;
    }
    out[0] = {false, false, fill_payload(v) ^ (1u << (p - 1)), 1};
    if (r == 0) return 1;
    out[1] = {true, v, 0, r};
    return 2;
  }
}

// Sequential run reader with skipping.
template <RleFormat F>
class Cursor {
 public:
  explicit Cursor(std::span<const std::uint32_t> words) : words_(words) { load(); }

  bool done() const { return left_ == 0; }
  const Run& run() const { return runs_[pos_]; }
  std::uint64_t left() const { return left_; }
  bool at_fill() const { return runs_[pos_].fill; }
  bool value() const { return runs_[pos_].value; }
  std::uint32_t payload() const { return runs_[pos_].payload(); }

  // n <= left()
  void advance(std::uint64_t n) {
    left_ -= n;
    if (left_ == 0) next();
  }

  // Consumes up to n segments across runs; returns how many were consumed.
  std::uint64_t skip(std::uint64_t n) {
    std::uint64_t consumed = 0;
    while (n > 0 && !done()) {
      const std::uint64_t k = std::min(n, left_);
      advance(k);
      n -= k;
      consumed += k;
    }
    return consumed;
  }

 private:
  void next() {
    if (++pos_ < nruns_) {
      left_ = runs_[pos_].count;
      return;
    }
    ++idx_;
    load();
  }
  void load() {
    while (idx_ < words_.size()) {
      nruns_ = split_word<F>(words_[idx_], runs_);
      pos_ = 0;
      left_ = runs_[0].count;
      if (left_ > 0) return;
      ++idx_;
    }
    left_ = 0;
  }

  std::span<const std::uint32_t> words_;
  std::size_t idx_ = 0;
  Run runs_[2]{};
  int nruns_ = 0;
  int pos_ = 0;
  std::uint64_t left_ = 0;
};

// Canonicalizing appender over a word vector.
template <RleFormat F>
class Writer {
 public:
  Writer(std::vector<std::uint32_t>& words, std::uint64_t& segments)
      : words_(words), segments_(segments) {}

  void literal(std::uint32_t payload) {
    payload &= kPayloadMask;
    if (payload == 0 || payload == kPayloadMask) {
      fill(payload != 0, 1);
      return;
    }
    ++segments_;
    if constexpr (F == RleFormat::kConcise) {
      const int ones = std::popcount(payload);
      if (ones == 1) {
        words_.push_back(concise_fill(false, std::countr_zero(payload) + 1, 0));
        return;
      }
      if (ones == kSegmentBits - 1) {
        words_.push_back(concise_fill(true, std::countr_zero(~payload) + 1, 0));
        return;
      }
    }
    words_.push_back(payload);
  }

  void fill(bool v, std::uint64_t n) {
    segments_ += n;
    if (n > 0 && !words_.empty() && is_fill(words_.back()) && fill_value(words_.back()) == v) {
      std::uint32_t& last = words_.back();
      if constexpr (F == RleFormat::kWah) {
        const std::uint64_t have = last & (kFillValueBit - 1);
        const std::uint64_t k = std::min(n, kWahMaxRun - have);
        last += static_cast<std::uint32_t>(k);
        n -= k;
      } else {
        const std::uint64_t k = std::min<std::uint64_t>(n, kConciseMaxR - concise_r(last));
        last += static_cast<std::uint32_t>(k);
        n -= k;
      }
    }
    while (n > 0) {
      if constexpr (F == RleFormat::kWah) {
        const std::uint64_t k = std::min(n, kWahMaxRun);
        words_.push_back(kFillFlag | (v ? kFillValueBit : 0) | static_cast<std::uint32_t>(k));
        n -= k;
      } else {
        const std::uint64_t k = std::min<std::uint64_t>(n, std::uint64_t{kConciseMaxR} + 1);
        words_.push_back(concise_fill(v, 0, static_cast<std::uint32_t>(k - 1)));
        n -= k;
      }
    }
  }

  void run(const Run& r) {
    if (r.fill) {
      fill(r.value, r.count);
    } else {
      literal(r.literal);
    }
  }

 private:
  std::vector<std::uint32_t>& words_;
  std::uint64_t& segments_;
};

template <RleFormat F, typename Emit>
void for_each_member(std::span<const std::uint32_t> words, Emit&& emit) {
  std::uint64_t seg = 0;
  Run runs[2];
  for (std::uint32_t w : words) {
    const int n = split_word<F>(w, runs);
    for (int k = 0; k < n; ++k) {
      const Run& r = runs[k];
      if (r.fill) {
        if (r.value) {
          const std::uint64_t first = seg * kSegmentBits;
          const std::uint64_t last = (seg + r.count) * kSegmentBits;
          for (std::uint64_t x = first; x < last; ++x) emit(x);
        }
      } else {
        std::uint32_t p = r.literal;
        while (p != 0) {
          emit(seg * kSegmentBits + static_cast<std::uint64_t>(std::countr_zero(p)));
          p &= p - 1;
        }
      }
      seg += r.count;
    }
  }
}

// Validates without materializing members: re-emits every run through the
// canonicalizing writer and requires the same words back.
template <RleFormat F>
std::uint64_t validate(std::span<const std::uint32_t> words) {
  // Bits of the last possible segment that lie past 2^32 - 1.
  constexpr std::uint32_t kTailBits = static_cast<std::uint32_t>((1ull << 32) - (kMaxSegments - 1) * kSegmentBits);
  constexpr std::uint32_t kOverflowMask = kPayloadMask & ~((1u << kTailBits) - 1);

  std::vector<std::uint32_t> canonical;
  std::uint64_t segments = 0;
  Writer<F> writer(canonical, segments);
  Run runs[2];
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (word_segments<F>(words[i]) == 0) throw RleFormatError(i, "fill word with zero run length");
    const int n = split_word<F>(words[i], runs);
    for (int k = 0; k < n; ++k) {
      const Run& r = runs[k];
      const std::uint64_t end = segments + r.count;
      if (end > kMaxSegments) throw RleFormatError(i, "bitmap extends past the 32-bit universe");
      if (end == kMaxSegments && (r.payload() & kOverflowMask) != 0) {
        throw RleFormatError(i, "set bit past the 32-bit universe");
      }
      writer.run(r);
    }
  }
  const auto diff = std::mismatch(words.begin(), words.end(), canonical.begin(), canonical.end());
  if (diff.first != words.end() || diff.second != canonical.end()) {
    throw RleFormatError(static_cast<std::size_t>(diff.first - words.begin()), "non-canonical encoding");
  }
  return segments;
}

template <RleFormat F>
std::vector<std::uint32_t> checked_decode(std::span<const std::uint32_t> words) {
  validate<F>(words);
  std::vector<std::uint32_t> values;
  for_each_member<F>(words, [&](std::uint64_t x) { values.push_back(static_cast<std::uint32_t>(x)); });
  return values;
}

}  // namespace

// ---------------------------------------------------------------------------

template <RleFormat F>
RleBitmap<F> RleBitmap<F>::encode(std::span<const std::uint32_t> values, std::uint64_t min_bits) {
  RleBitmap out;
  Writer<F> writer(out.words_, out.segments_);
  std::uint64_t seg = 0;
  std::uint32_t payload = 0;
  bool open = false;
  for (std::uint32_t v : values) {
    const std::uint64_t s = v / kSegmentBits;
    if (open && s != seg) {
      writer.literal(payload);
      payload = 0;
      open = false;
    }
    if (!open) {
      writer.fill(false, s - out.segments_);
      seg = s;
      open = true;
    }
    payload |= 1u << (v % kSegmentBits);
  }
  if (open) writer.literal(payload);
  const std::uint64_t min_segments = (min_bits + kSegmentBits - 1) / kSegmentBits;
  if (min_segments > out.segments_) writer.fill(false, min_segments - out.segments_);
  return out;
}

template <RleFormat F>
RleBitmap<F> RleBitmap<F>::from_words(std::vector<std::uint32_t> words) {
  RleBitmap out;
  out.segments_ = validate<F>(words);
  out.words_ = std::move(words);
  return out;
}

template <RleFormat F>
std::uint64_t RleBitmap<F>::cardinality() const {
  std::uint64_t n = 0;
  Run runs[2];
  for (std::uint32_t w : words_) {
    const int k = split_word<F>(w, runs);
    for (int i = 0; i < k; ++i) {
      n += runs[i].fill ? (runs[i].value ? runs[i].count * kSegmentBits : 0)
                        : static_cast<std::uint64_t>(std::popcount(runs[i].literal));
    }
  }
  return n;
}

template <RleFormat F>
std::vector<std::uint32_t> RleBitmap<F>::decode() const {
  std::vector<std::uint32_t> values;
  for_each_member<F>(words_, [&](std::uint64_t x) { values.push_back(static_cast<std::uint32_t>(x)); });
  return values;
}

template <RleFormat F>
bool RleBitmap<F>::contains(std::uint32_t x) const {
  const std::uint64_t target = x / kSegmentBits;
  const std::uint32_t bit = 1u << (x % kSegmentBits);
  std::uint64_t seg = 0;
  Run runs[2];
  for (std::uint32_t w : words_) {
    const int n = split_word<F>(w, runs);
    for (int k = 0; k < n; ++k) {
      if (target < seg + runs[k].count) return (runs[k].payload() & bit) != 0;
      seg += runs[k].count;
    }
  }
  return false;
}

template <RleFormat F>
void RleBitmap<F>::append(std::uint32_t x) {
  const std::uint64_t seg = x / kSegmentBits;
  std::uint32_t payload = 0;
  // Peel words off the tail until segment seg is no longer covered.
  while (segments_ > seg) {
    std::uint32_t& last = words_.back();
    const std::uint64_t len = word_segments<F>(last);
    const std::uint64_t first = segments_ - len;
    if (first >= seg) {
      if (first == seg) {
        Run runs[2];
        split_word<F>(last, runs);
        payload = runs[0].payload();
      }
      words_.pop_back();
      segments_ = first;
      continue;
    }
    // seg lies strictly inside a fill past its first segment: its payload is the fill.
    payload = fill_payload(fill_value(last));
    last -= static_cast<std::uint32_t>(segments_ - seg);
    segments_ = seg;
  }
  Writer<F> writer(words_, segments_);
  writer.fill(false, seg - segments_);
  writer.literal(payload | (1u << (x % kSegmentBits)));
}

template <RleFormat F>
void RleBitmap<F>::remove(std::uint32_t x) {
  std::vector<std::uint32_t> values = decode();
  const auto it = std::lower_bound(values.begin(), values.end(), x);
  if (it == values.end() || *it != x) return;
  values.erase(it);
  *this = encode(values, segments_ * kSegmentBits);
}

template <RleFormat F>
void RleBitmap<F>::add(std::uint32_t x) {
  std::vector<std::uint32_t> values = decode();
  if (values.empty() || x > values.back()) {
    append(x);
    return;
  }
  const auto it = std::lower_bound(values.begin(), values.end(), x);
  if (*it == x) return;
  values.insert(it, x);
  *this = encode(values, segments_ * kSegmentBits);
}

template class RleBitmap<RleFormat::kWah>;
template class RleBitmap<RleFormat::kConcise>;

// ---------------------------------------------------------------------------
// Merging

template <RleFormat F, typename Op>
RleBitmap<F> rle_merge(const RleBitmap<F>& a, const RleBitmap<F>& b, Op op) {
  // op(x, y) on payloads; absorb is the fill value that fixes the result.
  constexpr bool absorb = Op::kAbsorb;
  RleBitmap<F> out;
  Writer<F> writer(out.words_, out.segments_);
  Cursor<F> ca(a.words_);
  Cursor<F> cb(b.words_);
  while (!ca.done() && !cb.done()) {
    if (ca.at_fill() && ca.value() == absorb) {
      const std::uint64_t n = ca.left();
      writer.fill(absorb, n);
      ca.advance(n);
      cb.skip(n);
    } else if (cb.at_fill() && cb.value() == absorb) {
      const std::uint64_t n = cb.left();
      writer.fill(absorb, n);
      cb.advance(n);
      ca.skip(n);
    } else if (ca.at_fill() && cb.at_fill()) {
      // Both are identity fills.
      const std::uint64_t n = std::min(ca.left(), cb.left());
      writer.fill(!absorb, n);
      ca.advance(n);
      cb.advance(n);
    } else {
      writer.literal(op(ca.payload(), cb.payload()));
      ca.advance(1);
      cb.advance(1);
    }
  }
  // Past the shorter operand the missing segments read as zeros.
  Cursor<F>& rest = ca.done() ? cb : ca;
  while (!rest.done()) {
    if constexpr (absorb) {
      writer.run(Run{rest.run().fill, rest.run().value, rest.run().literal, rest.left()});
    } else {
      writer.fill(false, rest.left());
    }
    rest.advance(rest.left());
  }
  return out;
}

namespace {

struct AndOp {
  static constexpr bool kAbsorb = false;
  std::uint32_t operator()(std::uint32_t x, std::uint32_t y) const { return x & y; }
};
struct OrOp {
  static constexpr bool kAbsorb = true;
  std::uint32_t operator()(std::uint32_t x, std::uint32_t y) const { return x | y; }
};

}  // namespace

template <RleFormat F>
RleBitmap<F> rle_and(const RleBitmap<F>& a, const RleBitmap<F>& b) {
  return rle_merge(a, b, AndOp{});
}

template <RleFormat F>
RleBitmap<F> rle_or(const RleBitmap<F>& a, const RleBitmap<F>& b) {
  return rle_merge(a, b, OrOp{});
}

template WahBitmap rle_and(const WahBitmap&, const WahBitmap&);
template WahBitmap rle_or(const WahBitmap&, const WahBitmap&);
template ConciseBitmap rle_and(const ConciseBitmap&, const ConciseBitmap&);
template ConciseBitmap rle_or(const ConciseBitmap&, const ConciseBitmap&);

std::vector<std::uint32_t> wah_decode(std::span<const std::uint32_t> words) {
  return checked_decode<RleFormat::kWah>(words);
}
std::vector<std::uint32_t> concise_decode(std::span<const std::uint32_t> words) {
  return checked_decode<RleFormat::kConcise>(words);
}

WahBitmap wah_and(const WahBitmap& a, const WahBitmap& b) { return rle_and(a, b); }
WahBitmap wah_or(const WahBitmap& a, const WahBitmap& b) { return rle_or(a, b); }
ConciseBitmap concise_and(const ConciseBitmap& a, const ConciseBitmap& b) { return rle_and(a, b); }
ConciseBitmap concise_or(const ConciseBitmap& a, const ConciseBitmap& b) { return rle_or(a, b); }

}  // namespace roar
