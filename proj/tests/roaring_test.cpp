#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "roar/roaring_bitmap.hpp"

using namespace roar;

namespace {

std::vector<std::uint32_t> three_chunk_values() {
  std::vector<std::uint32_t> v;
  for (std::uint32_t k = 0; k < 1000; ++k) v.push_back(62 * k);
  for (std::uint32_t x = 1u << 16; x < (1u << 16) + 100; ++x) v.push_back(x);
  for (std::uint32_t x = 2u << 16; x < (3u << 16); x += 2) v.push_back(x);
  return v;
}

RoaringBitmap three_chunk() { return RoaringBitmap::from_sorted(three_chunk_values()); }

RoaringBitmap random_bitmap(std::mt19937_64& rng) {
  return RoaringBitmap::from_sorted(oracle::random_bitmap_values(rng));
}

}  // namespace

TEST(UniverseValue, SplitJoin) {
  const UniverseValue u{0x12345678};
  EXPECT_EQ(u.high(), 0x1234);
  EXPECT_EQ(u.low(), 0x5678);
  EXPECT_EQ(UniverseValue::join(u.high(), u.low()).v, u.v);
}

TEST(ThreeChunks, Layout) {
  const auto r = three_chunk();
  ASSERT_EQ(r.entries().size(), 3u);
  EXPECT_EQ(r.cardinality(), 33868u);
  EXPECT_EQ(kind_name(r.entries()[2].container), "bitmap");
  EXPECT_TRUE(r.contains((2u << 16) + 4));
  EXPECT_FALSE(r.contains((1u << 16) + 100));
  EXPECT_FALSE(RoaringBitmap().contains(7));
  EXPECT_EQ(r.rank((1u << 16) - 1), 1000u);
  EXPECT_EQ(r.rank(0), 1u);
  EXPECT_EQ(r.select(1000), 1u << 16);
  EXPECT_EQ(r.select(0), 0u);
  EXPECT_EQ(r.violation(), "");

  const auto v = r.to_vector();
  EXPECT_EQ(v.front(), 0u);
  EXPECT_EQ(v[1000], 1u << 16);
  EXPECT_EQ(v, three_chunk_values());
  EXPECT_EQ(r | r, r);
}

TEST(Construction, FromValuesSortsAndDedups) {
  const std::vector<std::uint32_t> raw = {9, 3, 3, 70000, 1};
  EXPECT_EQ(RoaringBitmap::from_values(raw).to_vector(), (std::vector<std::uint32_t>{1, 3, 9, 70000}));
  const std::vector<std::uint32_t> bad = {3, 1};
  EXPECT_THROW(RoaringBitmap::from_sorted(bad), std::invalid_argument);
}

TEST(AddRemove, Examples) {
  RoaringBitmap r;
  r.add(0);
  ASSERT_EQ(r.entries().size(), 1u);
  EXPECT_EQ(r.entries()[0].key, 0);
  EXPECT_EQ(r.entries()[0].container, Container(ArrayContainer(0)));

  RoaringBitmap chunk;
  for (std::uint32_t i = 0; i < 4096; ++i) chunk.add(5u << 16 | (i * 7));
  EXPECT_FALSE(is_bitmap(chunk.entries()[0].container));
  chunk.add(5u << 16 | 1);
  EXPECT_TRUE(is_bitmap(chunk.entries()[0].container));
  const auto copy = chunk;
  chunk.add(5u << 16 | 1);
  EXPECT_EQ(chunk, copy);
  chunk.remove(5u << 16 | 7);
  EXPECT_FALSE(is_bitmap(chunk.entries()[0].container));
  EXPECT_EQ(chunk.cardinality(), 4096u);
  chunk.remove(12345678);
  EXPECT_EQ(chunk.cardinality(), 4096u);

  r.remove(0);
  EXPECT_TRUE(r.empty());
  EXPECT_TRUE(r.entries().empty());
}

TEST(AddRemove, RandomOpsAgreeWithSet) {
  std::mt19937_64 rng(77);
  RoaringBitmap r;
  std::set<std::uint32_t> ref;
  // Narrow universe so chunks cross the threshold both ways.
  std::uniform_int_distribution<std::uint32_t> val(0, 3 * 65536 / 8);
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t x = val(rng) * 8 + (rng() % 2);
    switch (rng() % 3) {
      case 0: r.add(x); ref.insert(x); break;
      case 1: r.remove(x); ref.erase(x); break;
      default: ASSERT_EQ(r.contains(x), ref.count(x) == 1);
    }
    ASSERT_EQ(r.cardinality(), ref.size());
    if (i % 500 == 0) ASSERT_EQ(r.violation(), "");
  }
  EXPECT_EQ(r.to_vector(), std::vector<std::uint32_t>(ref.begin(), ref.end()));
}

TEST(SetOps, Examples) {
  const auto f = three_chunk();
  EXPECT_EQ(roaring_or(RoaringBitmap(), f), f);
  EXPECT_EQ(f & f, f);
  const auto a = RoaringBitmap::from_values(std::vector<std::uint32_t>{1, 2, 3});
  const auto b = RoaringBitmap::from_values(std::vector<std::uint32_t>{1u << 20, (1u << 20) + 1});
  EXPECT_TRUE((a & b).empty());

  auto x = f;
  roaring_or_inplace(x, RoaringBitmap());
  EXPECT_EQ(x, f);
  RoaringBitmap y;
  roaring_or_inplace(y, f);
  EXPECT_EQ(y, f);
}

TEST(SetOps, RandomAgainstOracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto va = oracle::random_bitmap_values(rng);
    const auto vb = oracle::random_bitmap_values(rng);
    const auto a = RoaringBitmap::from_sorted(va);
    const auto b = RoaringBitmap::from_sorted(vb);
    const auto u = a | b;
    const auto i = a & b;
    ASSERT_EQ(u.to_vector(), oracle::set_or(va, vb));
    ASSERT_EQ(i.to_vector(), oracle::set_and(va, vb));
    ASSERT_EQ(u.violation(), "");
    ASSERT_EQ(i.violation(), "");
    ASSERT_EQ(u, b | a);
    ASSERT_EQ(i, b & a);
    auto ip = a;
    ip |= b;
    ASSERT_EQ(ip, u);
    auto ia = a;
    ia &= b;
    ASSERT_EQ(ia, i);
  }
}

TEST(SetOps, Associative) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_bitmap(rng), b = random_bitmap(rng), c = random_bitmap(rng);
    ASSERT_EQ((a | b) | c, a | (b | c));
    ASSERT_EQ((a & b) & c, a & (b & c));
  }
}

TEST(MultiOr, Examples) {
  EXPECT_TRUE(multi_or(std::span<const RoaringBitmap>()).empty());
  const auto f = three_chunk();
  EXPECT_EQ(multi_or(std::span<const RoaringBitmap>(&f, 1)), f);

  std::mt19937_64 rng(41);
  std::vector<RoaringBitmap> many;
  for (int i = 0; i < 100; ++i) many.push_back(random_bitmap(rng));
  RoaringBitmap fold;
  for (const auto& m : many) fold = fold | m;
  const auto m = multi_or(many);
  EXPECT_EQ(m, fold);
  EXPECT_EQ(m.violation(), "");
}

TEST(RankSelect, Inverse) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    const auto v = oracle::random_bitmap_values(rng);
    const auto r = RoaringBitmap::from_sorted(v);
    ASSERT_EQ(r.cardinality(), v.size());
    for (std::size_t i = 0; i < v.size(); i += 1 + v.size() / 300) {
      ASSERT_EQ(r.select(i), v[i]);
      ASSERT_EQ(r.rank(v[i]), i + 1);
    }
    for (int q = 0; q < 200; ++q) {
      const auto x = static_cast<std::uint32_t>(rng() % (42u << 16));
      ASSERT_EQ(r.rank(x), static_cast<std::uint64_t>(std::upper_bound(v.begin(), v.end(), x) - v.begin()));
    }
    EXPECT_THROW(r.select(v.size()), std::out_of_range);
  }
}

TEST(Size, Model) {
  const auto one = RoaringBitmap::from_values(std::vector<std::uint32_t>{42});
  EXPECT_EQ(one.size_in_bytes(), 8u + 4u + 2u);
  EXPECT_EQ(RoaringBitmap().size_in_bytes(), 8u);
  const auto f = three_chunk();
  EXPECT_EQ(f.size_in_bytes(), 8u + 3 * 4u + 2000u + 200u + 8192u);

  std::vector<std::uint32_t> s;
  for (std::uint32_t k = 0; k < 1000; ++k) s.push_back(62 * k);
  const auto r = RoaringBitmap::from_sorted(s);
  const double bpi = 8.0 * r.size_in_bytes() / 1000;
  EXPECT_GE(bpi, 16.0);
  EXPECT_LE(bpi, 16.5);
}

TEST(Trim, ShrinksAllocationOnly) {
  RoaringBitmap r;
  for (std::uint32_t i = 0; i < 3000; ++i) r.add(i * 5);
  const auto before = r.to_vector();
  const auto reported = r.size_in_bytes();
  const auto allocated = r.allocated_bytes();
  r.trim();
  EXPECT_EQ(r.to_vector(), before);
  EXPECT_LE(r.size_in_bytes(), reported);
  EXPECT_LT(r.allocated_bytes(), allocated);
  // 3000 two-byte values plus the one index slot, nothing spare.
  EXPECT_EQ(r.allocated_bytes(), 6000 + sizeof(RoaringBitmap::Entry));
  RoaringBitmap e;
  e.trim();
  EXPECT_TRUE(e.empty());
}

TEST(Serialize, RoundTrip) {
  EXPECT_EQ(RoaringBitmap().serialize().size(), 8u);
  std::mt19937_64 rng(61);
  for (int t = 0; t < 100; ++t) {
    const auto r = random_bitmap(rng);
    const auto bytes = r.serialize();
    EXPECT_EQ(bytes.size(), r.size_in_bytes());
    const auto back = RoaringBitmap::deserialize(bytes);
    ASSERT_EQ(back, r);
    ASSERT_EQ(back.serialize(), bytes);
  }
}

TEST(Serialize, LittleEndianLayout) {
  const auto r = RoaringBitmap::from_values(std::vector<std::uint32_t>{0x00030005});
  const std::vector<std::uint8_t> expect = {0x52, 0x41, 0x4F, 0x52, 1, 0, 0, 0, 3, 0, 0, 0, 5, 0};
  EXPECT_EQ(r.serialize(), expect);
}

TEST(Serialize, RejectsMalformed) {
  const auto bytes = three_chunk().serialize();
  const auto fails = [](std::vector<std::uint8_t> b) {
    try {
      RoaringBitmap::deserialize(b);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(fails({bytes.begin(), bytes.end() - 1}), "");
  EXPECT_NE(fails({bytes.begin(), bytes.begin() + 5}), "");
  auto bad_magic = bytes;
  bad_magic[0] ^= 1;
  EXPECT_NE(fails(bad_magic), "");
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_NE(fails(extra), "");
  auto keys = bytes;
  keys[8 + 4 + 2000] = 0;  // second key -> 0, duplicates the first
  EXPECT_NE(fails(keys), "");
  auto order = bytes;
  std::swap(order[12], order[14]);  // first two array values out of order
  EXPECT_NE(fails(order), "");
  auto card = bytes;
  card.back() ^= 0x80;  // bitmap popcount disagrees with the stored cardinality
  EXPECT_NE(fails(card), "");
  try {
    RoaringBitmap::deserialize(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 5));
  } catch (const FormatError& e) {
    EXPECT_LE(e.offset(), 5u);
  }
}
