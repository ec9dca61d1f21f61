#pragma once

// Experiment orchestration: configs, the benchmark risk set, CSV output.

#include "ocerl/mdp.hpp"
#include "ocerl/optimist.hpp"
#include "ocerl/polopt.hpp"
#include "ocerl/risk.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ocerl {

enum class Algorithm { ExactDp, Oracle, Ucbvi, Npg };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

/// "mean", "cvar:TAU", "entropic:BETA", "mv:C", "meancvar:K1,K2", or "benchmark"
/// for benchmark_utilities(). Returns are assumed to lie in [z_min, z_max].
std::vector<UtilitySpec> parse_utilities(const std::string& text, double z_min, double z_max);

/// E-Var (c=1), E-2Var (c=2), Entr_-1, Entr_-2, CVaR_0.25, CVaR_0.5.
std::vector<UtilitySpec> benchmark_utilities(double z_min, double z_max);

/// "synthetic", "random:SEED" or the path of an MDP spec file.
TabularMDP load_mdp(const std::string& source);

/// [0, sum_h max r_h].
std::pair<double, double> return_range(const TabularMDP& mdp);

struct MarkovianBest {
  double value;              // best reporting value
  std::vector<int> actions;  // [h * S + s]
};

/// Enumerates the |A|^(H S) deterministic budget-blind Markov policies and
/// returns the best reporting value (E - c Var for mean-variance utilities,
/// the OCE otherwise). First enumerated policy wins ties.
MarkovianBest best_markovian(const TabularMDP& mdp, const UtilitySpec& u);

struct OracleAgreement {
  double dp_value;
  double oracle_value;
  double abs_diff;
  std::uint64_t policy_count;
};

/// Compares the augmented-MDP optimum with brute force over history-dependent
/// policies. Throws RefusalError when the policy count exceeds `policy_cap`.
OracleAgreement verify_against_oracle(const TabularMDP& mdp, const BudgetLattice& lattice,
                               const UtilitySpec& u, std::uint64_t policy_cap = 1'000'000);

struct ExperimentConfig {
  std::string mdp = "synthetic";
  std::string utility = "benchmark";
  Algorithm algorithm = Algorithm::ExactDp;
  /// 0 picks 2000 for ucbvi and 300 for npg.
  int rounds = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  double delta = 0.05;
  /// Non-positive picks H log|A|.
  double eta = 0.0;
  double bonus_scale = 1.0;
  int refine = 8;
  int sampled_rollouts = 0;
  std::uint64_t policy_cap = 1'000'000;
  std::filesystem::path out_dir = "ocerl_out";
};

/// Throws ConfigError on any out-of-range field.
void validate(const ExperimentConfig& cfg);

int effective_rounds(const ExperimentConfig& cfg);

struct SummaryStats {
  double mean;
  double sd;    // sample standard deviation, 0 for a single value
  double half;  // 1.96 sd / sqrt(n)
};

SummaryStats summarize(const std::vector<double>& values);

struct SummaryRow {
  std::string risk;
  std::string metric;  // "oce" or "mean_minus_c_var"
  double oce_star;
  double report_star;  // reporting value of the optimal policy's return law
  double b_star;
  double best_markovian;
  std::vector<double> finals;  // per seed, in config order
  SummaryStats stats;
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::vector<std::filesystem::path> files;
};

/// Runs every (utility, seed) pair, seeds concurrently, and writes
///   <algo>_<risk>_rounds.csv  round,seed,b_hat,oce_exact,rlb_or_vhat,regret_cum
///   <algo>_summary.csv        one row per risk, mean and 95% normal CI
///   <algo>_manifest.txt       the effective configuration
/// for ucbvi/npg; exact-dp writes solve.csv and oracle writes oracle.csv.
/// Output is byte-identical for identical configs. Config and output-path
/// problems raise ConfigError before any computation.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Fixed-width decimal used in every CSV cell.
std::string csv_number(double x);

}  // namespace ocerl
