#pragma once

// Bitmap index over a CSV table and the sampled AND/OR comparison run
// against it.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "roar/bench.hpp"
#include "roar/roaring_bitmap.hpp"

namespace roar {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IndexColumn {
  std::string name;
  // Distinct cell value -> rows (0-based) holding it.
  std::map<std::string, RoaringBitmap> bitmaps;

  friend bool operator==(const IndexColumn&, const IndexColumn&) = default;
};

struct AttributeIndex {
  std::uint64_t rows = 0;
  std::vector<IndexColumn> columns;

  std::size_t bitmap_count() const;
  friend bool operator==(const AttributeIndex&, const AttributeIndex&) = default;
};

// RFC 4180 records: comma separated, double quotes escape commas, quotes
// ("") and line breaks. A trailing newline does not start a record.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// First record is the header. Cells are treated as opaque strings and rows
// keep their file order. Throws IngestError on an empty input or a row whose
// field count differs from the header.
AttributeIndex build_index(std::istream& csv);
AttributeIndex build_index(const std::filesystem::path& csv);

// Each column's bitmaps must be pairwise disjoint and cover [0, rows).
// Throws IngestError naming the column otherwise.
void verify_partition(const AttributeIndex& index);

// Writes one serialized bitmap per (column, value) plus manifest.jsonl, whose
// first line describes the table and each further line one bitmap.
void index_save(const AttributeIndex& index, const std::filesystem::path& dir);
// Throws IndexLoadError naming the offending manifest entry.
AttributeIndex index_load(const std::filesystem::path& dir);

struct SampledBitmap {
  std::size_t column;
  std::string value;

  friend bool operator==(const SampledBitmap&, const SampledBitmap&) = default;
};

// Columns drawn uniformly with replacement, then one bitmap of each drawn
// column uniformly. Draws 2k and 2k+1 form pair k.
struct SamplePlan {
  std::uint64_t seed = 0;
  std::vector<SampledBitmap> draws;

  std::size_t pair_count() const { return draws.size() / 2; }
};

SamplePlan draw_sample_plan(const AttributeIndex& index, std::uint64_t seed,
                            std::size_t draws = kSampledBitmaps);

struct SchemeComparison {
  Scheme scheme;
  std::uint64_t size_bytes;  // summed over the sampled bitmaps
  double and_ns;             // summed over all pairs
  double or_ns;
  double size_factor;  // relative to Roaring
  double and_factor;
  double or_factor;
};

struct ComparisonReport {
  SamplePlan plan;
  std::vector<SchemeComparison> schemes;  // roaring first

  const SchemeComparison& find(Scheme s) const;
};

// Encodes the sampled bitmaps in every scheme, checks every AND and OR
// against Roaring's result (CorrectnessError on mismatch), then times the
// pairs. One untimed pass precedes the timed one.
ComparisonReport sample_and_compare(const AttributeIndex& index, std::uint64_t seed);

void write_report_csv(std::ostream& out, const ComparisonReport& report);
// Factor table: one row per non-Roaring scheme with size, AND and OR columns.
std::string format_factor_table(const ComparisonReport& report);

// A synthetic table with columns of assorted cardinalities and skews.
void generate_table_csv(std::ostream& out, std::uint64_t rows, std::uint64_t seed);

}  // namespace roar
