#pragma once

// Synthetic benchmark: compression and operation timing for Roaring, WAH,
// Concise and an uncompressed bitset over a grid of densities.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roar/bench_config.hpp"

namespace roar {

enum class Distribution { kUniform, kBeta };
enum class Scheme { kRoaring, kWah, kConcise, kBitset };
enum class Metric { kBitsPerInt, kAndNs, kOrNs, kAppendNs, kRemoveNs };
enum class SetOp { kAnd, kOr };

std::string_view to_string(Distribution d);
std::string_view to_string(Scheme s);
std::string_view to_string(Metric m);
Distribution parse_distribution(std::string_view s);
Scheme parse_scheme(std::string_view s);
std::vector<Scheme> parse_schemes(std::string_view list);
// Accepts "2^-10..2^-1", comma lists of "2^-k" terms, or plain decimals.
std::vector<double> parse_densities(std::string_view text);

inline const std::vector<Scheme> kAllSchemes = {Scheme::kRoaring, Scheme::kWah, Scheme::kConcise,
                                                Scheme::kBitset};

// One experiment cell per density.
struct BenchParams {
  Distribution distribution = Distribution::kUniform;
  std::vector<double> densities;
  std::uint64_t draws = kDefaultDraws;
  std::uint64_t seed = 0;
  int repetitions = kDefaultRepetitions;
  std::vector<Scheme> schemes = kAllSchemes;
  int warmup = kWarmupRuns;
  // Cells run on this many threads. Timed regions never overlap within a cell.
  int jobs = 1;

  void validate() const;
};

struct BenchRow {
  Scheme scheme;
  Distribution distribution;
  double density;
  Metric metric;
  double mean;
  double min;
  double stddev;
  int runs;
  double realized_cardinality;
};

// A timed result disagreed with the sorted-set oracle.
class CorrectnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// draws / d, floored; throws std::invalid_argument unless 0 < d <= 0.5 and
// the universe fits in 32 bits.
std::uint64_t universe_max(double density, std::uint64_t draws);

// `draws` values floor(y * max) (uniform) or floor(y^2 * max) (beta), with y
// uniform in [0, 1) from a BenchEngine seeded with `seed`. Returned sorted
// and deduplicated.
std::vector<std::uint32_t> gen_uniform(double density, std::uint64_t draws, std::uint64_t seed);
std::vector<std::uint32_t> gen_beta(double density, std::uint64_t draws, std::uint64_t seed);
std::vector<std::uint32_t> generate(Distribution dist, double density, std::uint64_t draws,
                                    std::uint64_t seed);

std::vector<BenchRow> run_compression(const BenchParams& params);
std::vector<BenchRow> run_pairwise(const BenchParams& params, SetOp op);
std::vector<BenchRow> run_append(const BenchParams& params);
std::vector<BenchRow> run_remove(const BenchParams& params);

inline constexpr std::string_view kCsvHeader =
    "scheme,dist,density,metric,mean,min,stddev,runs,realized_cardinality";

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
// One file per metric: "<stem>.<metric>.dat", density in column 1 and one
// column per scheme. Returns the written paths.
std::vector<std::filesystem::path> write_gnuplot(const std::filesystem::path& stem,
                                                 const std::vector<BenchRow>& rows);

}  // namespace roar
