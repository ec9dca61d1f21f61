#pragma once

// Self-checks behind the `check` and `bench` CLI subcommands.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ocerl {

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

/// OCE axioms, the mean-CVaR identity, augmented-DP vs brute force on random
/// MDPs, spec-file round trip and RLB monotonicity. Randomness derives from
/// `seed` only.
std::vector<CheckOutcome> run_property_checks(std::uint64_t seed);

struct BenchOptions {
  std::filesystem::path out_dir = "ocerl_out";
  int ucbvi_rounds = 2000;
  int npg_rounds = 300;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  int refine = 8;
};

/// Runs the synthetic-MDP benchmark, writes return_laws.csv and
/// benchmark.csv (plus the per-algorithm experiment files) and compares every
/// cell against its reference band.
std::vector<CheckOutcome> run_bench(const BenchOptions& options);

}  // namespace ocerl
