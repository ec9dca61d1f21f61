// ocerl: exact solves, learners and table reproduction from the command line.
//
// Exit codes: 0 success, 2 bad configuration, 3 a check or bench criterion
// failed. OCERL_OUT_DIR sets the default output directory.

#include "ocerl/checks.hpp"
#include "ocerl/errors.hpp"
#include "ocerl/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace {

constexpr int kConfigError = 2;
constexpr int kCheckFailed = 3;

std::string default_out_dir() {
  const char* env = std::getenv("OCERL_OUT_DIR");
  return env && *env ? env : "ocerl_out";
}

void add_common(CLI::App* cmd, ocerl::ExperimentConfig& cfg, std::string& out) {
  cmd->add_option("--mdp", cfg.mdp, "synthetic, random:SEED or an MDP spec file")->capture_default_str();
  cmd->add_option("--utility", cfg.utility,
                  "benchmark, or ';'-separated mean | cvar:TAU | entropic:BETA | mv:C | meancvar:K1,K2")
      ->capture_default_str();
  cmd->add_option("--refine", cfg.refine, "budget lattice points per reward quantum")->capture_default_str();
  cmd->add_option("--out", out, "output directory (default $OCERL_OUT_DIR or ./ocerl_out)");
}

void print_rows(const ocerl::ExperimentResult& r, bool with_ci) {
  for (const auto& row : r.rows) {
    std::printf("%-12s optimum %.6f  best-markovian %.6f", row.risk.c_str(), row.report_star,
                row.best_markovian);
    if (with_ci) std::printf("  final %.6f +- %.6f (%s)", row.stats.mean, row.stats.half, row.metric.c_str());
    std::printf("\n");
  }
  for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
}

int report(const std::vector<ocerl::CheckOutcome>& outcomes) {
  bool ok = true;
  for (const auto& c : outcomes) {
    std::printf("%s  %s  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive tabular RL with optimized certainty equivalents"};
  app.require_subcommand(1);

  ocerl::ExperimentConfig cfg;
  std::string out;

  auto* solve = app.add_subcommand("solve", "exact augmented-MDP optimum, checked against brute force");
  add_common(solve, cfg, out);
  solve->add_option("--policy-cap", cfg.policy_cap, "skip brute force above this many policies")
      ->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "brute force over history-dependent policies");
  add_common(oracle, cfg, out);
  oracle->add_option("--policy-cap", cfg.policy_cap, "refuse above this many policies")->capture_default_str();

  auto* ucbvi = app.add_subcommand("ucbvi", "optimistic meta-algorithm with UCB-VI");
  add_common(ucbvi, cfg, out);
  ucbvi->add_option("--rounds,-K", cfg.rounds, "episodes (default 2000)");
  ucbvi->add_option("--seeds", cfg.seeds, "seeds, space or comma separated")->delimiter(',')->capture_default_str();
  ucbvi->add_option("--delta", cfg.delta, "confidence level")->capture_default_str();
  ucbvi->add_option("--bonus-scale", cfg.bonus_scale, "bonus multiplier")->capture_default_str();

  auto* npg = app.add_subcommand("npg", "policy-optimization meta-algorithm with softmax NPG");
  add_common(npg, cfg, out);
  npg->add_option("--rounds,-K", cfg.rounds, "iterations (default 300)");
  npg->add_option("--seeds", cfg.seeds, "seeds, space or comma separated")->delimiter(',')->capture_default_str();
  npg->add_option("--eta", cfg.eta, "learning rate (default H log|A|)");
  npg->add_option("--sampled-rollouts", cfg.sampled_rollouts, "estimate Q from rollouts (0 = exact)")
      ->capture_default_str();

  ocerl::BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "run the synthetic benchmark and check it against reference bands");
  bench->add_option("--out", out, "output directory (default $OCERL_OUT_DIR or ./ocerl_out)");
  bench->add_option("--ucbvi-rounds", bench_opts.ucbvi_rounds, "UCB-VI episodes")->capture_default_str();
  bench->add_option("--npg-rounds", bench_opts.npg_rounds, "NPG iterations")->capture_default_str();
  bench->add_option("--seeds", bench_opts.seeds, "seeds, space or comma separated")->delimiter(',')->capture_default_str();
  bench->add_option("--refine", bench_opts.refine, "budget lattice points per reward quantum")->capture_default_str();

  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "property suites");
  check->add_option("--seed", check_seed, "seed for the randomized suites")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    const std::string out_dir = out.empty() ? default_out_dir() : out;
    if (check->parsed()) return report(ocerl::run_property_checks(check_seed));
    if (bench->parsed()) {
      if (bench_opts.ucbvi_rounds < 1 || bench_opts.npg_rounds < 1 || bench_opts.seeds.empty())
        throw ocerl::ConfigError("bench needs positive round counts and at least one seed");
      bench_opts.out_dir = out_dir;
      return report(ocerl::run_bench(bench_opts));
    }
    cfg.out_dir = out_dir;
    if (solve->parsed()) cfg.algorithm = ocerl::Algorithm::ExactDp;
    if (oracle->parsed()) cfg.algorithm = ocerl::Algorithm::Oracle;
    if (ucbvi->parsed()) cfg.algorithm = ocerl::Algorithm::Ucbvi;
    if (npg->parsed()) cfg.algorithm = ocerl::Algorithm::Npg;
    const auto result = ocerl::run_experiment(cfg);
    print_rows(result, cfg.algorithm == ocerl::Algorithm::Ucbvi || cfg.algorithm == ocerl::Algorithm::Npg);
    return 0;
  } catch (const ocerl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ocerl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
