#include "roar/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "roar/bitset.hpp"
#include "roar/rle.hpp"

namespace roar {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw IngestError("unterminated quoted field in record " + std::to_string(records.size() + 1));
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

// ---------------------------------------------------------------------------
// Index

std::size_t AttributeIndex::bitmap_count() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.bitmaps.size();
  return n;
}

AttributeIndex build_index(std::istream& csv) {
  auto records = parse_csv(csv);
  if (records.empty()) throw IngestError("empty CSV input");

  AttributeIndex index;
  for (auto& name : records[0]) index.columns.push_back({std::move(name), {}});
  const std::size_t width = index.columns.size();

  // Row ids per (column, value) arrive in increasing order.
  std::vector<std::map<std::string, std::vector<std::uint32_t>>> rows_of(width);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw IngestError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                        " fields, header has " + std::to_string(width));
    }
    const auto row = static_cast<std::uint32_t>(r - 1);
    for (std::size_t c = 0; c < width; ++c) rows_of[c][std::move(records[r][c])].push_back(row);
  }
  index.rows = records.size() - 1;
  for (std::size_t c = 0; c < width; ++c) {
    for (auto& [value, ids] : rows_of[c]) {
      index.columns[c].bitmaps.emplace(value, RoaringBitmap::from_sorted(ids));
    }
  }
  return index;
}

AttributeIndex build_index(const fs::path& csv) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw IngestError("cannot open " + csv.string());
  return build_index(in);
}

void verify_partition(const AttributeIndex& index) {
  for (const auto& column : index.columns) {
    std::uint64_t total = 0;
    std::vector<const RoaringBitmap*> parts;
    for (const auto& [value, bitmap] : column.bitmaps) {
      total += bitmap.cardinality();
      parts.push_back(&bitmap);
      if (const auto max = bitmap.maximum(); max && *max >= index.rows) {
        throw IngestError("column '" + column.name + "' value '" + value + "' references row " +
                          std::to_string(*max) + " of " + std::to_string(index.rows));
      }
    }
    const RoaringBitmap all = multi_or(std::span<const RoaringBitmap* const>(parts));
    if (total != index.rows || all.cardinality() != index.rows) {
      throw IngestError("column '" + column.name + "' bitmaps do not partition " +
                        std::to_string(index.rows) + " rows (sum " + std::to_string(total) +
                        ", union " + std::to_string(all.cardinality()) + ")");
    }
  }
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kManifest = "manifest.jsonl";

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IndexLoadError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

void index_save(const AttributeIndex& index, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / kManifest);
  if (!manifest) throw std::runtime_error("cannot write " + (dir / kManifest).string());

  json header = {{"format", "roarlab-index"}, {"version", 1}, {"rows", index.rows}};
  header["columns"] = json::array();
  for (const auto& c : index.columns) header["columns"].push_back(c.name);
  manifest << header.dump() << '\n';

  for (std::size_t c = 0; c < index.columns.size(); ++c) {
    std::size_t v = 0;
    for (const auto& [value, bitmap] : index.columns[c].bitmaps) {
      const std::string file = "c" + std::to_string(c) + "_v" + std::to_string(v++) + ".roar";
      write_bytes(dir / file, bitmap.serialize());
      const json entry = {{"column", index.columns[c].name},
                          {"column_index", c},
                          {"value", value},
                          {"file", file},
                          {"cardinality", bitmap.cardinality()}};
      manifest << entry.dump() << '\n';
    }
  }
}

AttributeIndex index_load(const fs::path& dir) {
  std::ifstream manifest(dir / kManifest);
  if (!manifest) throw IndexLoadError("missing " + (dir / kManifest).string());

  std::string line;
  if (!std::getline(manifest, line)) throw IndexLoadError("empty manifest");
  AttributeIndex index;
  try {
    const json header = json::parse(line);
    if (header.at("format") != "roarlab-index") throw IndexLoadError("unknown manifest format");
    index.rows = header.at("rows").get<std::uint64_t>();
    for (const auto& name : header.at("columns")) index.columns.push_back({name.get<std::string>(), {}});
  } catch (const json::exception& e) {
    throw IndexLoadError(std::string("manifest header: ") + e.what());
  }

  std::size_t lineno = 1;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::string label = "manifest line " + std::to_string(lineno);
    try {
      const json entry = json::parse(line);
      const auto c = entry.at("column_index").get<std::size_t>();
      const auto value = entry.at("value").get<std::string>();
      const auto file = entry.at("file").get<std::string>();
      const auto card = entry.at("cardinality").get<std::uint64_t>();
      label += " (" + file + ")";
      if (c >= index.columns.size()) throw IndexLoadError(label + ": column index out of range");
      if (file.find('/') != std::string::npos || file.find("..") != std::string::npos) {
        throw IndexLoadError(label + ": file must be a plain name");
      }
      RoaringBitmap bitmap = RoaringBitmap::deserialize(read_bytes(dir / file));
      if (bitmap.cardinality() != card) {
        throw IndexLoadError(label + ": cardinality " + std::to_string(bitmap.cardinality()) +
                             " does not match manifest " + std::to_string(card));
      }
      if (!index.columns[c].bitmaps.emplace(value, std::move(bitmap)).second) {
        throw IndexLoadError(label + ": duplicate value");
      }
    } catch (const json::exception& e) {
      throw IndexLoadError(label + ": " + e.what());
    } catch (const FormatError& e) {
      throw IndexLoadError(label + ": " + e.what());
    }
  }
  try {
    verify_partition(index);
  } catch (const IngestError& e) {
    throw IndexLoadError(e.what());
  }
  return index;
}

// ---------------------------------------------------------------------------
// Sampling and comparison

SamplePlan draw_sample_plan(const AttributeIndex& index, std::uint64_t seed, std::size_t draws) {
  std::vector<std::size_t> usable;
  for (std::size_t c = 0; c < index.columns.size(); ++c) {
    if (!index.columns[c].bitmaps.empty()) usable.push_back(c);
  }
  if (usable.empty()) throw std::invalid_argument("index has no bitmaps to sample");

  SamplePlan plan;
  plan.seed = seed;
  BenchEngine rng(splitmix64(seed));
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t c = usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
    const auto& bitmaps = index.columns[c].bitmaps;
    auto it = bitmaps.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, bitmaps.size() - 1)(rng));
    plan.draws.push_back({c, it->first});
  }
  return plan;
}

const SchemeComparison& ComparisonReport::find(Scheme s) const {
  for (const auto& c : schemes) {
    if (c.scheme == s) return c;
  }
  throw std::out_of_range("scheme not in report");
}

namespace {

volatile std::uint64_t g_sink = 0;

template <typename Set, typename Encode, typename And, typename Or, typename Decode, typename Size>
SchemeComparison compare_scheme(Scheme scheme, const std::vector<std::vector<std::uint32_t>>& inputs,
                                const std::vector<std::vector<std::uint32_t>>& ref_and,
                                const std::vector<std::vector<std::uint32_t>>& ref_or,
                                Encode encode, And op_and, Or op_or, Decode decode, Size size) {
  std::vector<Set> sets;
  sets.reserve(inputs.size());
  std::uint64_t bytes = 0;
  for (const auto& v : inputs) {
    sets.push_back(encode(v));
    bytes += size(sets.back());
  }
  const std::size_t pairs = sets.size() / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    if (decode(op_and(sets[2 * p], sets[2 * p + 1])) != ref_and[p] ||
        decode(op_or(sets[2 * p], sets[2 * p + 1])) != ref_or[p]) {
      throw CorrectnessError(std::string(to_string(scheme)) + " disagrees with roaring on pair " +
                             std::to_string(p));
    }
  }
  const auto timed = [&](auto op) {
    double total = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
      const auto t0 = std::chrono::steady_clock::now();
      Set r = op(sets[2 * p], sets[2 * p + 1]);
      const auto t1 = std::chrono::steady_clock::now();
      g_sink = g_sink + size(r);
      total += std::chrono::duration<double, std::nano>(t1 - t0).count();
    }
    return total;
  };
  timed(op_and);
  timed(op_or);
  const double and_ns = timed(op_and);
  const double or_ns = timed(op_or);
  return {scheme, bytes, and_ns, or_ns, 1.0, 1.0, 1.0};
}

}  // namespace

ComparisonReport sample_and_compare(const AttributeIndex& index, std::uint64_t seed) {
  ComparisonReport report;
  report.plan = draw_sample_plan(index, seed);

  std::vector<std::vector<std::uint32_t>> inputs;
  std::vector<const RoaringBitmap*> sampled;
  for (const auto& d : report.plan.draws) {
    const RoaringBitmap& b = index.columns[d.column].bitmaps.at(d.value);
    sampled.push_back(&b);
    inputs.push_back(b.to_vector());
  }
  std::vector<std::vector<std::uint32_t>> ref_and, ref_or;
  for (std::size_t p = 0; p < report.plan.pair_count(); ++p) {
    ref_and.push_back((*sampled[2 * p] & *sampled[2 * p + 1]).to_vector());
    ref_or.push_back((*sampled[2 * p] | *sampled[2 * p + 1]).to_vector());
  }

  report.schemes.push_back(compare_scheme<RoaringBitmap>(
      Scheme::kRoaring, inputs, ref_and, ref_or,
      [](const auto& v) { return RoaringBitmap::from_sorted(v); },
      [](const RoaringBitmap& a, const RoaringBitmap& b) { return a & b; },
      [](const RoaringBitmap& a, const RoaringBitmap& b) { return a | b; },
      [](const RoaringBitmap& r) { return r.to_vector(); },
      [](const RoaringBitmap& r) { return static_cast<std::uint64_t>(r.size_in_bytes()); }));
  report.schemes.push_back(compare_scheme<ConciseBitmap>(
      Scheme::kConcise, inputs, ref_and, ref_or, [](const auto& v) { return ConciseBitmap::encode(v); },
      [](const ConciseBitmap& a, const ConciseBitmap& b) { return rle_and(a, b); },
      [](const ConciseBitmap& a, const ConciseBitmap& b) { return rle_or(a, b); },
      [](const ConciseBitmap& r) { return r.decode(); },
      [](const ConciseBitmap& r) { return r.size_bits() / 8; }));
  report.schemes.push_back(compare_scheme<WahBitmap>(
      Scheme::kWah, inputs, ref_and, ref_or, [](const auto& v) { return WahBitmap::encode(v); },
      [](const WahBitmap& a, const WahBitmap& b) { return rle_and(a, b); },
      [](const WahBitmap& a, const WahBitmap& b) { return rle_or(a, b); },
      [](const WahBitmap& r) { return r.decode(); },
      [](const WahBitmap& r) { return r.size_bits() / 8; }));
  report.schemes.push_back(compare_scheme<PlainBitset>(
      Scheme::kBitset, inputs, ref_and, ref_or, [](const auto& v) { return PlainBitset::from_values(v); },
      [](const PlainBitset& a, const PlainBitset& b) { return clone_and(a, b); },
      [](const PlainBitset& a, const PlainBitset& b) { return clone_or(a, b); },
      [](const PlainBitset& r) { return r.to_vector(); },
      [](const PlainBitset& r) { return static_cast<std::uint64_t>(r.size_in_bytes()); }));

  const SchemeComparison base = report.schemes.front();
  for (auto& s : report.schemes) {
    s.size_factor = static_cast<double>(s.size_bytes) / static_cast<double>(base.size_bytes);
    s.and_factor = s.and_ns / base.and_ns;
    s.or_factor = s.or_ns / base.or_ns;
  }
  return report;
}

void write_report_csv(std::ostream& out, const ComparisonReport& report) {
  out << "scheme,size_bytes,and_ns,or_ns,size_factor,and_factor,or_factor\n";
  char buf[256];
  for (const auto& s : report.schemes) {
    std::snprintf(buf, sizeof buf, "%s,%llu,%.1f,%.1f,%.4f,%.4f,%.4f\n",
                  std::string(to_string(s.scheme)).c_str(),
                  static_cast<unsigned long long>(s.size_bytes), s.and_ns, s.or_ns, s.size_factor,
                  s.and_factor, s.or_factor);
    out << buf;
  }
}

std::string format_factor_table(const ComparisonReport& report) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s\n", "", "size", "and", "or");
  out << buf;
  for (const auto& s : report.schemes) {
    if (s.scheme == Scheme::kRoaring) continue;
    std::snprintf(buf, sizeof buf, "%-8s %10.2f %10.2f %10.2f\n", std::string(to_string(s.scheme)).c_str(),
                  s.size_factor, s.and_factor, s.or_factor);
    out << buf;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Synthetic table

void generate_table_csv(std::ostream& out, std::uint64_t rows, std::uint64_t seed) {
  BenchEngine rng(splitmix64(seed));
  std::uniform_int_distribution<int> region(0, 7);
  std::uniform_int_distribution<int> age(18, 97);
  std::uniform_int_distribution<std::uint64_t> account(0, std::max<std::uint64_t>(rows / 4, 1));
  const std::uint64_t days = 30;
  out << "region,status,age,account,day,flag\n";
  for (std::uint64_t r = 0; r < rows; ++r) {
    const double u = unit_draw(rng);
    const char* status = u < 0.80 ? "active" : (u < 0.95 ? "suspended" : "closed");
    // Rows arrive roughly in day order, which produces long runs.
    const std::uint64_t day = std::min(days - 1, r * days / std::max<std::uint64_t>(rows, 1));
    out << "r" << region(rng) << ',' << status << ',' << age(rng) << ",acct" << account(rng) << ",d"
        << day << ',' << (unit_draw(rng) < 0.5 ? "yes" : "no") << '\n';
  }
}

}  // namespace roar
