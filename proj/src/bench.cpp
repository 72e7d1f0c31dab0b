#include "roar/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>

#include "roar/bitset.hpp"
#include "roar/rle.hpp"
#include "roar/roaring_bitmap.hpp"

namespace roar {

// ---------------------------------------------------------------------------
// Names and parsing

std::string_view to_string(Distribution d) { return d == Distribution::kUniform ? "uniform" : "beta"; }

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kRoaring: return "roaring";
    case Scheme::kWah: return "wah";
    case Scheme::kConcise: return "concise";
    case Scheme::kBitset: return "bitset";
  }
  return "?";
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kBitsPerInt: return "bits_per_int";
    case Metric::kAndNs: return "and_ns";
    case Metric::kOrNs: return "or_ns";
    case Metric::kAppendNs: return "append_ns";
    case Metric::kRemoveNs: return "remove_ns";
  }
  return "?";
}

Distribution parse_distribution(std::string_view s) {
  if (s == "uniform") return Distribution::kUniform;
  if (s == "beta") return Distribution::kBeta;
  throw std::invalid_argument("unknown distribution '" + std::string(s) + "'");
}

Scheme parse_scheme(std::string_view s) {
  for (Scheme k : kAllSchemes) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    parts.push_back(s.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "2^-k" -> -k; nullopt if not a power-of-two term.
std::optional<int> power_exponent(std::string_view term) {
  if (term.substr(0, 2) != "2^") return std::nullopt;
  term.remove_prefix(2);
  int e = 0;
  const auto [ptr, ec] = std::from_chars(term.data(), term.data() + term.size(), e);
  if (ec != std::errc() || ptr != term.data() + term.size()) {
    throw std::invalid_argument("bad density exponent '" + std::string(term) + "'");
  }
  return e;
}

double parse_density_term(std::string_view term) {
  term = strip(term);
  if (const auto e = power_exponent(term)) return std::ldexp(1.0, *e);
  const std::string owned(term);
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(owned, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != owned.size() || owned.empty()) {
    throw std::invalid_argument("bad density '" + owned + "'");
  }
  return d;
}

}  // namespace

std::vector<Scheme> parse_schemes(std::string_view list) {
  std::vector<Scheme> out;
  for (auto part : split(list, ',')) {
    const Scheme s = parse_scheme(strip(part));
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<double> parse_densities(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    part = strip(part);
    if (const auto dots = part.find(".."); dots != std::string_view::npos &&
                                           part.substr(0, 2) == "2^") {
      const auto lo = power_exponent(strip(part.substr(0, dots)));
      const auto hi = power_exponent(strip(part.substr(dots + 2)));
      if (!lo || !hi) throw std::invalid_argument("density ranges must be powers of two");
      const int step = *lo <= *hi ? 1 : -1;
      for (int e = *lo;; e += step) {
        out.push_back(std::ldexp(1.0, e));
        if (e == *hi) break;
      }
    } else {
      out.push_back(parse_density_term(part));
    }
  }
  return out;
}

void BenchParams::validate() const {
  if (densities.empty()) throw std::invalid_argument("no densities given");
  for (double d : densities) universe_max(d, draws);
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (warmup < 0) throw std::invalid_argument("warmup must be >= 0");
  if (schemes.empty()) throw std::invalid_argument("no schemes given");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

// ---------------------------------------------------------------------------
// Generators

std::uint64_t universe_max(double density, std::uint64_t draws) {
  if (!(density > 0.0 && density <= 0.5)) {
    throw std::invalid_argument("density must lie in (0, 0.5]");
  }
  const long double m = std::floor(static_cast<long double>(draws) / density);
  if (m < 1 || m > 4294967296.0L) throw std::invalid_argument("universe does not fit in 32 bits");
  return static_cast<std::uint64_t>(m);
}

namespace {

template <typename Transform>
std::vector<std::uint32_t> draw_set(double density, std::uint64_t draws, std::uint64_t seed,
                                    Transform transform) {
  const std::uint64_t max = universe_max(density, draws);
  BenchEngine rng(seed);
  std::vector<std::uint32_t> out;
  out.reserve(draws);
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double y = unit_draw(rng);
    out.push_back(static_cast<std::uint32_t>(std::floor(transform(y) * static_cast<double>(max))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::uint32_t> gen_uniform(double density, std::uint64_t draws, std::uint64_t seed) {
  return draw_set(density, draws, seed, [](double y) { return y; });
}

std::vector<std::uint32_t> gen_beta(double density, std::uint64_t draws, std::uint64_t seed) {
  return draw_set(density, draws, seed, [](double y) { return y * y; });
}

std::vector<std::uint32_t> generate(Distribution dist, double density, std::uint64_t draws,
                                    std::uint64_t seed) {
  return dist == Distribution::kUniform ? gen_uniform(density, draws, seed)
                                        : gen_beta(density, draws, seed);
}

// ---------------------------------------------------------------------------
// Scheme adapters

namespace {

struct RoaringScheme {
  using Set = RoaringBitmap;
  static Set build(std::span<const std::uint32_t> v) { return RoaringBitmap::from_sorted(v); }
  static std::uint64_t size_bits(Set& s) {
    s.trim();
    return 8 * static_cast<std::uint64_t>(s.size_in_bytes());
  }
  static Set op(SetOp op, const Set& a, const Set& b) { return op == SetOp::kAnd ? a & b : a | b; }
  static void append(Set& s, std::uint32_t x) { s.add(x); }
  static void remove(Set& s, std::uint32_t x) { s.remove(x); }
  static std::vector<std::uint32_t> decode(const Set& s) { return s.to_vector(); }
  static std::uint64_t cardinality(const Set& s) { return s.cardinality(); }
  static std::string audit(const Set& s) { return s.violation(); }
};

template <RleFormat F>
struct RleScheme {
  using Set = RleBitmap<F>;
  static Set build(std::span<const std::uint32_t> v) { return Set::encode(v); }
  static std::uint64_t size_bits(Set& s) { return s.size_bits(); }
  static Set op(SetOp op, const Set& a, const Set& b) {
    return op == SetOp::kAnd ? rle_and(a, b) : rle_or(a, b);
  }
  static void append(Set& s, std::uint32_t x) { s.append(x); }
  static void remove(Set& s, std::uint32_t x) { s.remove(x); }
  static std::vector<std::uint32_t> decode(const Set& s) { return s.decode(); }
  static std::uint64_t cardinality(const Set& s) { return s.cardinality(); }
  static std::string audit(const Set& s) {
    try {
      Set::from_words({s.words().begin(), s.words().end()});
    } catch (const RleFormatError& e) {
      return e.what();
    }
    return {};
  }
};

struct BitsetScheme {
  using Set = PlainBitset;
  static Set build(std::span<const std::uint32_t> v) { return PlainBitset::from_values(v); }
  // Untrimmed: the doubling slack is part of what is measured.
  static std::uint64_t size_bits(Set& s) { return 8 * static_cast<std::uint64_t>(s.size_in_bytes()); }
  static Set op(SetOp op, const Set& a, const Set& b) {
    return op == SetOp::kAnd ? clone_and(a, b) : clone_or(a, b);
  }
  static void append(Set& s, std::uint32_t x) { s.set(x); }
  static void remove(Set& s, std::uint32_t x) { s.clear(x); }
  static std::vector<std::uint32_t> decode(const Set& s) { return s.to_vector(); }
  static std::uint64_t cardinality(const Set& s) { return s.cardinality(); }
  static std::string audit(const Set&) { return {}; }
};

template <typename Fn>
decltype(auto) with_scheme(Scheme s, Fn&& fn) {
  switch (s) {
    case Scheme::kRoaring: return fn(RoaringScheme{});
    case Scheme::kWah: return fn(RleScheme<RleFormat::kWah>{});
    case Scheme::kConcise: return fn(RleScheme<RleFormat::kConcise>{});
    case Scheme::kBitset: break;
  }
  return fn(BitsetScheme{});
}

template <typename F>
double time_ns(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

volatile std::uint64_t g_sink = 0;

struct Samples {
  std::vector<double> values;
  double cardinality_sum = 0;

  BenchRow row(Scheme s, Distribution d, double density, Metric m) const {
    const double n = static_cast<double>(values.size());
    double mean = 0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    return BenchRow{s,
                    d,
                    density,
                    m,
                    mean,
                    *std::min_element(values.begin(), values.end()),
                    std::sqrt(var),
                    static_cast<int>(values.size()),
                    cardinality_sum / n};
  }
};

void expect_equal(const std::vector<std::uint32_t>& got, const std::vector<std::uint32_t>& want,
                  Scheme s, std::string_view what, double density, int rep) {
  if (got == want) return;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %s mismatch at density %.10g repetition %d: %zu vs %zu values",
                std::string(to_string(s)).c_str(), std::string(what).c_str(), density, rep,
                got.size(), want.size());
  throw CorrectnessError(buf);
}

// Runs `cell(index)` for every density, possibly across threads, and
// concatenates the rows in density order.
template <typename Cell>
std::vector<BenchRow> run_cells(const BenchParams& params, Cell cell) {
  params.validate();
  const std::size_t n = params.densities.size();
  std::vector<std::vector<BenchRow>> per_cell(n);
  if (params.jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) per_cell[i] = cell(i);
  } else {
    std::size_t next = 0;
    while (next < n) {
      std::vector<std::future<std::vector<BenchRow>>> batch;
      const std::size_t end = std::min(n, next + static_cast<std::size_t>(params.jobs));
      for (std::size_t i = next; i < end; ++i) batch.push_back(std::async(std::launch::async, cell, i));
      for (std::size_t i = next; i < end; ++i) per_cell[i] = batch[i - next].get();
      next = end;
    }
  }
  std::vector<BenchRow> rows;
  for (auto& c : per_cell) rows.insert(rows.end(), c.begin(), c.end());
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Runners

std::vector<BenchRow> run_compression(const BenchParams& params) {
  return run_cells(params, [&params](std::size_t cell) {
    const double d = params.densities[cell];
    std::vector<Samples> samples(params.schemes.size());
    for (int rep = 0; rep < params.repetitions; ++rep) {
      const auto values = generate(params.distribution, d, params.draws,
                                   derive_seed(params.seed, cell, static_cast<std::uint64_t>(rep), 0));
      const double card = static_cast<double>(values.size());
      for (std::size_t k = 0; k < params.schemes.size(); ++k) {
        const std::uint64_t bits = with_scheme(params.schemes[k], [&](auto scheme) {
          using S = decltype(scheme);
          auto set = S::build(values);
          return S::size_bits(set);
        });
        samples[k].values.push_back(static_cast<double>(bits) / card);
        samples[k].cardinality_sum += card;
      }
    }
    std::vector<BenchRow> rows;
    for (std::size_t k = 0; k < params.schemes.size(); ++k) {
      rows.push_back(samples[k].row(params.schemes[k], params.distribution, d, Metric::kBitsPerInt));
    }
    return rows;
  });
}

std::vector<BenchRow> run_pairwise(const BenchParams& params, SetOp op) {
  return run_cells(params, [&params, op](std::size_t cell) {
    const double d = params.densities[cell];
    const Metric metric = op == SetOp::kAnd ? Metric::kAndNs : Metric::kOrNs;
    std::vector<Samples> samples(params.schemes.size());
    for (int rep = 0; rep < params.repetitions; ++rep) {
      const auto r = static_cast<std::uint64_t>(rep);
      const auto a = generate(params.distribution, d, params.draws, derive_seed(params.seed, cell, r, 0));
      const auto b = generate(params.distribution, d, params.draws, derive_seed(params.seed, cell, r, 1));
      std::vector<std::uint32_t> expected;
      if (op == SetOp::kAnd) {
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(expected));
      } else {
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(expected));
      }
      const double card = 0.5 * static_cast<double>(a.size() + b.size());

      for (std::size_t k = 0; k < params.schemes.size(); ++k) {
        const double ns = with_scheme(params.schemes[k], [&](auto scheme) {
          using S = decltype(scheme);
          const auto sa = S::build(a);
          const auto sb = S::build(b);
          const auto gate = S::op(op, sa, sb);
          expect_equal(S::decode(gate), expected, params.schemes[k], op == SetOp::kAnd ? "and" : "or",
                       d, rep);
          if (rep == 0) {
            for (int w = 0; w < params.warmup; ++w) g_sink = g_sink + S::cardinality(S::op(op, sa, sb));
          }
          typename S::Set result;
          const double t = time_ns([&] { result = S::op(op, sa, sb); });
          g_sink = g_sink + S::cardinality(result);
          return t;
        });
        samples[k].values.push_back(ns);
        samples[k].cardinality_sum += card;
      }
    }
    std::vector<BenchRow> rows;
    for (std::size_t k = 0; k < params.schemes.size(); ++k) {
      rows.push_back(samples[k].row(params.schemes[k], params.distribution, d, metric));
    }
    return rows;
  });
}

namespace {

enum class Mutation { kAppend, kRemove };

std::vector<BenchRow> run_mutation(const BenchParams& params, Mutation mutation) {
  return run_cells(params, [&params, mutation](std::size_t cell) {
    const double d = params.densities[cell];
    std::vector<Samples> samples(params.schemes.size());
    for (int rep = 0; rep < params.repetitions; ++rep) {
      const auto r = static_cast<std::uint64_t>(rep);
      const auto values = generate(params.distribution, d, params.draws, derive_seed(params.seed, cell, r, 0));
      if (values.empty()) continue;
      std::uint32_t x;
      std::vector<std::uint32_t> expected = values;
      if (mutation == Mutation::kAppend) {
        x = values.back() + 1;
        expected.push_back(x);
      } else {
        BenchEngine pick(derive_seed(params.seed, cell, r, 2));
        const auto idx = static_cast<std::size_t>(pick() % values.size());
        x = values[idx];
        expected.erase(expected.begin() + static_cast<std::ptrdiff_t>(idx));
      }
      const char* what = mutation == Mutation::kAppend ? "append" : "remove";

      for (std::size_t k = 0; k < params.schemes.size(); ++k) {
        const double ns = with_scheme(params.schemes[k], [&](auto scheme) {
          using S = decltype(scheme);
          const auto base = S::build(values);
          const auto apply = [&](typename S::Set& s) {
            if (mutation == Mutation::kAppend) {
              S::append(s, x);
            } else {
              S::remove(s, x);
            }
          };
          {
            auto check = base;
            apply(check);
            expect_equal(S::decode(check), expected, params.schemes[k], what, d, rep);
            if (const std::string v = S::audit(check); !v.empty()) {
              throw CorrectnessError(std::string(to_string(params.schemes[k])) + " " + what +
                                     " broke an invariant: " + v);
            }
          }
          if (rep == 0) {
            for (int w = 0; w < params.warmup; ++w) {
              auto copy = base;
              apply(copy);
              g_sink = g_sink + S::cardinality(copy);
            }
          }
          auto target = base;
          const double t = time_ns([&] { apply(target); });
          g_sink = g_sink + S::cardinality(target);
          return t;
        });
        samples[k].values.push_back(ns);
        samples[k].cardinality_sum += static_cast<double>(values.size());
      }
    }
    std::vector<BenchRow> rows;
    const Metric metric = mutation == Mutation::kAppend ? Metric::kAppendNs : Metric::kRemoveNs;
    for (std::size_t k = 0; k < params.schemes.size(); ++k) {
      if (samples[k].values.empty()) continue;
      rows.push_back(samples[k].row(params.schemes[k], params.distribution, d, metric));
    }
    return rows;
  });
}

}  // namespace

std::vector<BenchRow> run_append(const BenchParams& params) { return run_mutation(params, Mutation::kAppend); }
std::vector<BenchRow> run_remove(const BenchParams& params) { return run_mutation(params, Mutation::kRemove); }

// ---------------------------------------------------------------------------
// Output

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kCsvHeader << '\n';
  char buf[256];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%s,%.6f,%.6f,%.6f,%d,%.2f\n",
                  std::string(to_string(r.scheme)).c_str(),
                  std::string(to_string(r.distribution)).c_str(), r.density,
                  std::string(to_string(r.metric)).c_str(), r.mean, r.min, r.stddev, r.runs,
                  r.realized_cardinality);
    out << buf;
  }
}

std::vector<std::filesystem::path> write_gnuplot(const std::filesystem::path& stem,
                                                 const std::vector<BenchRow>& rows) {
  std::map<Metric, std::vector<const BenchRow*>> by_metric;
  for (const BenchRow& r : rows) by_metric[r.metric].push_back(&r);

  std::vector<std::filesystem::path> written;
  for (const auto& [metric, list] : by_metric) {
    std::vector<Scheme> schemes;
    std::vector<double> densities;
    std::map<std::pair<double, Scheme>, double> value;
    for (const BenchRow* r : list) {
      if (std::find(schemes.begin(), schemes.end(), r->scheme) == schemes.end()) schemes.push_back(r->scheme);
      if (std::find(densities.begin(), densities.end(), r->density) == densities.end()) {
        densities.push_back(r->density);
      }
      value[{r->density, r->scheme}] = r->mean;
    }
    std::sort(densities.begin(), densities.end());

    std::filesystem::path path = stem;
    path += "." + std::string(to_string(metric)) + ".dat";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "# " << to_string(metric) << "\n# density";
    for (Scheme s : schemes) f << ' ' << to_string(s);
    f << '\n';
    char buf[64];
    for (double d : densities) {
      std::snprintf(buf, sizeof buf, "%.10g", d);
      f << buf;
      for (Scheme s : schemes) {
        const auto it = value.find({d, s});
        if (it == value.end()) {
          f << " NaN";
        } else {
          std::snprintf(buf, sizeof buf, " %.6f", it->second);
          f << buf;
        }
      }
      f << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace roar
