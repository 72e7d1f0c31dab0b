// bench: synthetic compression and timing experiments over a density grid.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "roar/bench.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic bitmap benchmarks: roaring vs wah, concise and an uncompressed bitset"};
  app.require_subcommand(1);

  std::string dist = "uniform";
  std::string densities = "2^-10..2^-1";
  std::string schemes = "roaring,wah,concise,bitset";
  std::string out_path;
  std::string op = "both";
  bool gnuplot = false;
  roar::BenchParams params;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--dist", dist, "uniform or beta")->check(CLI::IsMember({"uniform", "beta"}));
    cmd->add_option("--densities", densities, "e.g. 2^-10..2^-1, or a comma list");
    cmd->add_option("--draws", params.draws, "pseudo-random draws per generated set");
    cmd->add_option("--reps", params.repetitions, "repetitions per cell");
    cmd->add_option("--seed", params.seed, "master seed");
    cmd->add_option("--schemes", schemes, "comma list of roaring,wah,concise,bitset");
    cmd->add_option("--warmup", params.warmup, "untimed runs before timing");
    cmd->add_option("--jobs", params.jobs, "cells run in parallel (timings interfere when > 1)");
    cmd->add_option("--out", out_path, "CSV output path (default: stdout)");
    cmd->add_flag("--gnuplot", gnuplot, "also write <out>.<metric>.dat files");
  };
  auto* compress = app.add_subcommand("compress", "bits per integer");
  auto* pairwise = app.add_subcommand("pairwise", "intersection and union time");
  auto* append = app.add_subcommand("append", "time to append a value past the maximum");
  auto* remove = app.add_subcommand("remove", "time to remove a random member");
  for (auto* cmd : {compress, pairwise, append, remove}) add_common(cmd);
  pairwise->add_option("--op", op, "and, or or both")->check(CLI::IsMember({"and", "or", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    params.distribution = roar::parse_distribution(dist);
    params.densities = roar::parse_densities(densities);
    params.schemes = roar::parse_schemes(schemes);
    params.validate();

    std::vector<roar::BenchRow> rows;
    if (compress->parsed()) {
      rows = roar::run_compression(params);
    } else if (pairwise->parsed()) {
      if (op != "or") rows = roar::run_pairwise(params, roar::SetOp::kAnd);
      if (op != "and") {
        auto more = roar::run_pairwise(params, roar::SetOp::kOr);
        rows.insert(rows.end(), more.begin(), more.end());
      }
    } else if (append->parsed()) {
      rows = roar::run_append(params);
    } else {
      rows = roar::run_remove(params);
    }
    if (!compress->parsed()) {
      std::cerr << "note: wah and concise timings come from this library's reference implementation\n";
    }

    if (out_path.empty()) {
      roar::write_csv(std::cout, rows);
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      roar::write_csv(out, rows);
    }
    if (gnuplot) {
      const std::filesystem::path stem =
          out_path.empty() ? std::filesystem::path("bench") : std::filesystem::path(out_path).replace_extension();
      for (const auto& p : roar::write_gnuplot(stem, rows)) std::cerr << "wrote " << p.string() << '\n';
    }
  } catch (const roar::CorrectnessError& e) {
    std::cerr << "correctness gate failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
