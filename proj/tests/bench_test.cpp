#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "oracle.hpp"
#include "roar/bench.hpp"
#include "roar/bitset.hpp"
#include "roar/rle.hpp"
#include "roar/roaring_bitmap.hpp"

using namespace roar;

namespace {

// Same engine, transform written out independently.
std::vector<double> raw_draws(std::uint64_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> y;
  for (std::uint64_t i = 0; i < draws; ++i) y.push_back(std::ldexp(static_cast<double>(rng() >> 11), -53));
  return y;
}

BenchParams small_spec(std::vector<double> densities, int reps = 3) {
  BenchParams s;
  s.densities = std::move(densities);
  s.draws = 5000;
  s.repetitions = reps;
  s.warmup = 1;
  s.seed = 99;
  return s;
}

// 8-byte header, 4 bytes per chunk, then 2 bytes per member or 8192 bytes.
std::uint64_t size_model_bytes(const std::vector<std::uint32_t>& v) {
  std::map<std::uint32_t, std::uint64_t> per_chunk;
  for (auto x : v) ++per_chunk[x >> 16];
  std::uint64_t bytes = 8;
  for (const auto& [key, n] : per_chunk) bytes += 4 + (n > 4096 ? 8192 : 2 * n);
  return bytes;
}

const BenchRow& find(const std::vector<BenchRow>& rows, Scheme s, double d) {
  for (const auto& r : rows) {
    if (r.scheme == s && r.density == d) return r;
  }
  throw std::runtime_error("row not found");
}

}  // namespace

TEST(Parse, Densities) {
  const auto grid = parse_densities("2^-10..2^-1");
  ASSERT_EQ(grid.size(), 10u);
  EXPECT_EQ(grid.front(), std::ldexp(1.0, -10));
  EXPECT_EQ(grid.back(), 0.5);
  EXPECT_EQ(parse_densities("0.25, 2^-3"), (std::vector<double>{0.25, 0.125}));
  EXPECT_THROW(parse_densities("2^x"), std::invalid_argument);
  EXPECT_THROW(parse_densities("fast"), std::invalid_argument);
  EXPECT_EQ(parse_schemes("wah, roaring,wah"), (std::vector<Scheme>{Scheme::kWah, Scheme::kRoaring}));
  EXPECT_THROW(parse_schemes("ewah"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("zipf"), std::invalid_argument);
}

TEST(BenchParams, Validate) {
  auto s = small_spec({0.5});
  EXPECT_NO_THROW(s.validate());
  s.densities = {0.75};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.densities = {0.5};
  s.repetitions = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_EQ(universe_max(std::ldexp(1.0, -10), 100000), 102400000u);
  EXPECT_THROW(universe_max(std::ldexp(1.0, -20), 100000), std::invalid_argument);
}

TEST(SeedSplit, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t cell = 0; cell < 10; ++cell)
    for (std::uint64_t rep = 0; rep < 100; ++rep)
      for (std::uint64_t stream = 0; stream < 3; ++stream) seen.insert(derive_seed(7, cell, rep, stream));
  EXPECT_EQ(seen.size(), 3000u);
}

TEST(GenUniform, Examples) {
  const auto tiny = gen_uniform(0.5, 4, 1234);
  for (auto v : tiny) EXPECT_LT(v, 8u);

  const double d = std::ldexp(1.0, -10);
  const auto max = universe_max(d, 100000);
  const auto v = gen_uniform(d, 100000, 42);
  EXPECT_LT(v.back(), max);
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));

  std::set<std::uint64_t> sim;
  for (double y : raw_draws(100000, 42)) sim.insert(static_cast<std::uint64_t>(std::floor(y * max)));
  EXPECT_EQ(v.size(), sim.size());
  EXPECT_TRUE(std::equal(v.begin(), v.end(), sim.begin()));
  // Birthday collisions among 10^5 draws in 1.024e8 cells: about 49.
  EXPECT_NEAR(static_cast<double>(100000 - v.size()), 100000.0 * 99999 / 2 / max, 25);

  EXPECT_EQ(gen_uniform(0.25, 1000, 5), gen_uniform(0.25, 1000, 5));
  EXPECT_NE(gen_uniform(0.25, 1000, 5), gen_uniform(0.25, 1000, 6));
}

TEST(GenBeta, SkewAndCdf) {
  const double d = std::ldexp(1.0, -10);
  const auto max = static_cast<double>(universe_max(d, 100000));
  const auto v = gen_beta(d, 100000, 8);
  EXPECT_LT(v.back(), max);

  // Median of y^2 is max/4.
  const double median = v[v.size() / 2];
  EXPECT_LT(median, max / 2);
  EXPECT_NEAR(median / max, 0.25, 0.01);

  double sup = 0;
  for (int q = 1; q < 1000; ++q) {
    const double x = max * q / 1000.0;
    const double emp = static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) / v.size();
    sup = std::max(sup, std::abs(emp - std::sqrt(x / max)));
  }
  EXPECT_LT(sup, 0.01);

  std::set<std::uint64_t> sim;
  for (double y : raw_draws(100000, 8)) sim.insert(static_cast<std::uint64_t>(std::floor(y * y * max)));
  EXPECT_TRUE(std::equal(v.begin(), v.end(), sim.begin(), sim.end()));
}

TEST(Compression, Bounds) {
  BenchParams s;
  s.densities = {0.5, std::ldexp(1.0, -4), std::ldexp(1.0, -10)};
  s.repetitions = 3;
  s.seed = 1;
  const auto rows = run_compression(s);
  ASSERT_EQ(rows.size(), 12u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.metric, Metric::kBitsPerInt);
    EXPECT_EQ(r.runs, 3);
    EXPECT_GT(r.mean, 0);
    EXPECT_LE(r.min, r.mean);
  }
  // Dense end: 10^5 draws over max = 2*10^5 leave a realized density of
  // about 1 - e^-0.5, so full chunks cost ~2.54 bits per member before the
  // partial last chunk and the index are added.
  double model = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto v = gen_uniform(0.5, s.draws, derive_seed(s.seed, 0, rep, 0));
    model += 8.0 * size_model_bytes(v) / v.size() / 3;
  }
  EXPECT_NEAR(find(rows, Scheme::kRoaring, 0.5).mean, model, 1e-9);
  EXPECT_GT(model, 2.5);
  EXPECT_LT(model, 2.8);
  const double sparse = std::ldexp(1.0, -10);
  EXPECT_LE(find(rows, Scheme::kRoaring, sparse).mean, 0.6 * find(rows, Scheme::kConcise, sparse).mean);
  EXPECT_LE(find(rows, Scheme::kRoaring, sparse).mean, 0.35 * find(rows, Scheme::kWah, sparse).mean);
  for (double d : s.densities) {
    const auto& b = find(rows, Scheme::kBitset, d);
    const double per_member = universe_max(d, s.draws) / b.realized_cardinality;
    EXPECT_GE(b.min, per_member * 0.999) << d;
    EXPECT_LE(b.mean, 2 * per_member * 1.001) << d;
  }
}

TEST(Compression, Deterministic) {
  const auto s = small_spec({0.5, 0.125, std::ldexp(1.0, -8)});
  std::ostringstream a, b;
  write_csv(a, run_compression(s));
  write_csv(b, run_compression(s));
  EXPECT_EQ(a.str(), b.str());
  auto par = s;
  par.jobs = 3;
  std::ostringstream c;
  write_csv(c, run_compression(par));
  EXPECT_EQ(a.str(), c.str());
}

TEST(Compression, SizeGrowsWithCardinality) {
  // Fixed universe 2^20, growing draw counts. The bitset's reported size
  // follows its doubling history instead, checked separately below.
  for (Scheme scheme : {Scheme::kRoaring, Scheme::kWah, Scheme::kConcise}) {
    double previous = 0;
    for (int k = 10; k <= 19; ++k) {
      BenchParams s;
      s.draws = 1ull << k;
      s.densities = {std::ldexp(1.0, k - 20)};
      s.repetitions = 3;
      s.schemes = {scheme};
      const auto row = run_compression(s).at(0);
      const double total = row.mean * row.realized_cardinality;
      EXPECT_GE(total, previous * 0.999) << to_string(scheme) << " k=" << k;
      previous = total;
    }
  }
}

TEST(Compression, BitsetSizeTracksOccupancy) {
  std::uint64_t previous = 0;
  for (int k = 10; k <= 19; ++k) {
    const auto v = gen_uniform(std::ldexp(1.0, k - 20), 1ull << k, 5);
    auto b = PlainBitset::from_values(v);
    const auto reported = b.size_in_bytes();
    b.trim();
    const auto exact = b.size_in_bytes();
    EXPECT_EQ(exact, 8 * (v.back() / 64 + 1));
    EXPECT_GE(exact, previous);
    EXPECT_GE(reported, exact);
    EXPECT_LE(reported, 2 * exact);
    previous = exact;
  }
}

TEST(Pairwise, ShapeAndGate) {
  const auto s = small_spec({0.5, std::ldexp(1.0, -6), std::ldexp(1.0, -10)});
  for (SetOp op : {SetOp::kAnd, SetOp::kOr}) {
    const auto rows = run_pairwise(s, op);
    ASSERT_EQ(rows.size(), 12u);
    std::set<std::pair<int, double>> cells;
    for (const auto& r : rows) {
      EXPECT_EQ(r.metric, op == SetOp::kAnd ? Metric::kAndNs : Metric::kOrNs);
      EXPECT_GE(r.min, 0);
      EXPECT_EQ(r.runs, 3);
      cells.insert({static_cast<int>(r.scheme), r.density});
    }
    EXPECT_EQ(cells.size(), 12u);
  }
}

TEST(Pairwise, IdenticalInputs) {
  const auto v = gen_uniform(std::ldexp(1.0, -3), 20000, 3);
  EXPECT_EQ(RoaringBitmap::from_sorted(v) & RoaringBitmap::from_sorted(v), RoaringBitmap::from_sorted(v));
  EXPECT_EQ(wah_and(wah_encode(v), wah_encode(v)).cardinality(), v.size());
  EXPECT_EQ(concise_and(concise_encode(v), concise_encode(v)).cardinality(), v.size());
  const auto b = PlainBitset::from_values(v);
  EXPECT_EQ(clone_and(b, b).cardinality(), v.size());
}

TEST(Mutation, AppendAndRemoveRun) {
  const auto s = small_spec({0.5, std::ldexp(1.0, -4)});
  const auto app = run_append(s);
  const auto rem = run_remove(s);
  ASSERT_EQ(app.size(), 8u);
  ASSERT_EQ(rem.size(), 8u);
  for (const auto& r : app) EXPECT_EQ(r.metric, Metric::kAppendNs);
  for (const auto& r : rem) EXPECT_EQ(r.metric, Metric::kRemoveNs);
}

TEST(Mutation, RoaringRemoveKeepsInvariants) {
  const auto v = gen_uniform(std::ldexp(1.0, -4), 100000, 17);
  auto r = RoaringBitmap::from_sorted(v);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto x = v[rng() % v.size()];
    const auto before = r.cardinality();
    const bool present = r.contains(x);
    r.remove(x);
    ASSERT_EQ(r.cardinality(), before - (present ? 1 : 0));
    ASSERT_FALSE(r.contains(x));
    ASSERT_EQ(r.violation(), "");
  }
  const auto card = r.cardinality();
  r.add(v.back() + 1);
  EXPECT_EQ(r.cardinality(), card + 1);
}

TEST(Output, CsvAndGnuplot) {
  const auto rows = run_compression(small_spec({0.5, 0.25}, 1));
  std::ostringstream out;
  write_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCsvHeader);
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(n, 8);

  const auto dir = std::filesystem::temp_directory_path() / "roar_gnuplot_test";
  std::filesystem::create_directories(dir);
  const auto files = write_gnuplot(dir / "run", rows);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].filename(), "run.bits_per_int.dat");
  std::ifstream dat(files[0]);
  std::string header;
  std::getline(dat, header);
  EXPECT_EQ(header, "# bits_per_int");
  std::getline(dat, header);
  EXPECT_NE(header.find("roaring"), std::string::npos);
  std::filesystem::remove_all(dir);
}
