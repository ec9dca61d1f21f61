#include "ocerl/experiment.hpp"

#include "ocerl/augdp.hpp"
#include "ocerl/envs.hpp"
#include "ocerl/errors.hpp"
#include "ocerl/oracle.hpp"
#include "ocerl/spec_file.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace ocerl {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "exact-dp") return Algorithm::ExactDp;
  if (name == "oracle") return Algorithm::Oracle;
  if (name == "ucbvi") return Algorithm::Ucbvi;
  if (name == "npg") return Algorithm::Npg;
  throw ConfigError("unknown algorithm '" + name + "' (expected exact-dp, oracle, ucbvi or npg)");
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ExactDp:
      return "exact-dp";
    case Algorithm::Oracle:
      return "oracle";
    case Algorithm::Ucbvi:
      return "ucbvi";
    case Algorithm::Npg:
      return "npg";
  }
  return "?";
}

namespace {

double param(const std::string& tok, const std::string& spec) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (tok.empty() || used != tok.size() || !std::isfinite(v))
    throw ConfigError("bad number '" + tok + "' in utility '" + spec + "'");
  return v;
}

UtilitySpec parse_one(const std::string& spec, double z_min, double z_max) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "mean" && args.empty()) return UtilitySpec::mean(z_min, z_max);
    if (kind == "cvar") return UtilitySpec::cvar(param(args, spec), z_min, z_max);
    if (kind == "entropic") return UtilitySpec::entropic(param(args, spec), z_min, z_max);
    if (kind == "mv") return UtilitySpec::mean_variance(param(args, spec), z_min, z_max);
    if (kind == "meancvar") {
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw ConfigError("meancvar needs 'meancvar:K1,K2'");
      return UtilitySpec::mean_cvar(param(args.substr(0, comma), spec),
                                    param(args.substr(comma + 1), spec), z_min, z_max);
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("utility '") + spec + "': " + e.what());
  }
  throw ConfigError("unknown utility '" + spec + "'");
}

}  // namespace

std::vector<UtilitySpec> benchmark_utilities(double z_min, double z_max) {
  return {UtilitySpec::mean_variance(1.0, z_min, z_max), UtilitySpec::mean_variance(2.0, z_min, z_max),
          UtilitySpec::entropic(-1.0, z_min, z_max),     UtilitySpec::entropic(-2.0, z_min, z_max),
          UtilitySpec::cvar(0.25, z_min, z_max),         UtilitySpec::cvar(0.5, z_min, z_max)};
}

std::vector<UtilitySpec> parse_utilities(const std::string& text, double z_min, double z_max) {
  if (text == "benchmark") return benchmark_utilities(z_min, z_max);
  std::vector<UtilitySpec> out;
  std::istringstream is(text);
  for (std::string tok; std::getline(is, tok, ';');)
    if (!tok.empty()) out.push_back(parse_one(tok, z_min, z_max));
  if (out.empty()) throw ConfigError("no utility given");
  return out;
}

TabularMDP load_mdp(const std::string& source) {
  if (source == "synthetic") return build_synthetic_mdp();
  if (source.starts_with("random:")) {
    const auto tok = source.substr(7);
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw ConfigError("bad seed in '" + source + "'");
    return random_mdp(seed);
  }
  if (!std::filesystem::exists(source))
    throw ConfigError("MDP source '" + source + "' is neither a builtin nor an existing file");
  try {
    return read_mdp_spec(source);
  } catch (const ParseError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

std::pair<double, double> return_range(const TabularMDP& mdp) {
  std::int64_t top = 0;
  for (int h = 0; h < mdp.horizon(); ++h) top += mdp.max_reward_ticks(h);
  return {0.0, mdp.reward_value(top)};
}

MarkovianBest best_markovian(const TabularMDP& mdp, const UtilitySpec& u) {
  const auto lattice = build_lattice(mdp, 1);
  const int cells = mdp.horizon() * mdp.n_states();
  const double total = std::pow(static_cast<double>(mdp.n_actions()), cells);
  if (total > 1e7) throw RefusalError("too many Markov policies to enumerate", static_cast<std::uint64_t>(total));
  const auto b1 = lattice.initial_indices().back();
  std::vector<int> actions(static_cast<std::size_t>(cells), 0);
  MarkovianBest best{-INFINITY, actions};
  while (true) {
    const auto pi = AugPolicy::markov(mdp.horizon(), mdp.n_states(), lattice.size(), mdp.n_actions(), actions);
    const double v = reporting_value(u, exact_return_distribution(mdp, lattice, pi, b1));
    if (v > best.value) best = {v, actions};
    std::size_t j = actions.size();
    while (j > 0 && ++actions[j - 1] == mdp.n_actions()) actions[--j] = 0;
    if (j == 0) break;
  }
  return best;
}

OracleAgreement verify_against_oracle(const TabularMDP& mdp, const BudgetLattice& lattice,
                               const UtilitySpec& u, std::uint64_t policy_cap) {
  const auto dp = solve_optimal_oce(mdp, lattice, u);
  OracleOptions opts;
  opts.policy_cap = policy_cap;
  const auto oracle = brute_force_oracle(mdp, u, opts);
  return {dp.value, oracle.value, std::abs(dp.value - oracle.value), oracle.policy_count};
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.rounds < 0) throw ConfigError("rounds must be non-negative");
  if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!std::isfinite(cfg.eta)) throw ConfigError("eta must be finite");
  if (!(cfg.bonus_scale >= 0.0) || !std::isfinite(cfg.bonus_scale))
    throw ConfigError("bonus scale must be finite and non-negative");
  if (cfg.refine < 1 || cfg.refine > 1024) throw ConfigError("refine must lie in [1, 1024]");
  if (cfg.sampled_rollouts < 0) throw ConfigError("sampled rollouts must be non-negative");
  if (cfg.policy_cap < 1) throw ConfigError("policy cap must be positive");
  if (cfg.out_dir.empty()) throw ConfigError("output directory is empty");
}

int effective_rounds(const ExperimentConfig& cfg) {
  if (cfg.rounds > 0) return cfg.rounds;
  return cfg.algorithm == Algorithm::Npg ? 300 : 2000;
}

SummaryStats summarize(const std::vector<double>& values) {
  if (values.empty()) throw ArgumentError("cannot summarize an empty sample");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd, 1.96 * sd / std::sqrt(n)};
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12f", x);
  // Values that round to zero print without a sign.
  if (buf[0] == '-' && std::strspn(buf + 1, "0.") == std::strlen(buf + 1)) return buf + 1;
  return buf;
}

namespace {

struct SeedTrace {
  std::vector<std::string> lines;
  double final_report;
};

std::string metric_name(const UtilitySpec& u) {
  return u.kind() == UtilityKind::MeanVariance ? "mean_minus_c_var" : "oce";
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

SeedTrace run_seed(const ExperimentConfig& cfg, const TabularMDP& mdp, const BudgetLattice& lattice,
                   const UtilitySpec& u, std::uint64_t seed) {
  SeedTrace t{{}, 0.0};
  const auto seed_str = std::to_string(seed);
  if (cfg.algorithm == Algorithm::Ucbvi) {
    OptimistOptions o;
    o.rounds = effective_rounds(cfg);
    o.seed = seed;
    o.ucbvi.delta = cfg.delta;
    o.ucbvi.bonus_scale = cfg.bonus_scale;
    const auto run = run_meta_optimistic(mdp, lattice, u, o);
    for (const auto& l : run.logs)
      t.lines.push_back(std::to_string(l.round) + "," + seed_str + "," + csv_number(l.b_hat) + "," +
                        csv_number(l.oce) + "," + csv_number(l.v_hat) + "," + csv_number(l.cum_regret));
    t.final_report = run.logs.back().report;
  } else {
    PoOptions o;
    o.rounds = effective_rounds(cfg);
    o.eta = cfg.eta;
    o.seed = seed;
    o.sampled_rollouts = cfg.sampled_rollouts;
    const auto run = run_meta_po(mdp, lattice, u, o);
    double cum = 0.0;
    for (const auto& l : run.logs) {
      cum += run.oce_star - l.oce;
      t.lines.push_back(std::to_string(l.round) + "," + seed_str + "," + csv_number(l.b_hat) + "," +
                        csv_number(l.oce) + "," + csv_number(l.rlb) + "," + csv_number(cum));
    }
    t.final_report = run.logs.back().report;
  }
  return t;
}

SummaryRow optimum_row(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u) {
  const auto opt = solve_optimal_oce(mdp, lattice, u);
  const auto law = exact_return_distribution(mdp, lattice, opt.policy, opt.b1_index);
  return {u.label(), metric_name(u), opt.value, reporting_value(u, law), opt.budget,
          best_markovian(mdp, u).value, {}, {}};
}

void write_manifest(std::ostream& out, const ExperimentConfig& cfg) {
  out << "algorithm " << algorithm_name(cfg.algorithm) << "\n"
      << "mdp " << cfg.mdp << "\n"
      << "utility " << cfg.utility << "\n"
      << "rounds " << effective_rounds(cfg) << "\n"
      << "seeds";
  for (auto s : cfg.seeds) out << ' ' << s;
  out << "\n"
      << "delta " << csv_number(cfg.delta) << "\n"
      << "eta " << (cfg.eta > 0.0 ? csv_number(cfg.eta) : std::string("H*log|A|")) << "\n"
      << "bonus_scale " << csv_number(cfg.bonus_scale) << "\n"
      << "refine " << cfg.refine << "\n"
      << "sampled_rollouts " << cfg.sampled_rollouts << "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto mdp = load_mdp(cfg.mdp);
  const auto [z_min, z_max] = return_range(mdp);
  const auto utilities = parse_utilities(cfg.utility, z_min, z_max);
  const auto lattice = build_lattice(mdp, cfg.refine);

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());

  ExperimentResult result;
  const auto algo = algorithm_name(cfg.algorithm);

  if (cfg.algorithm == Algorithm::ExactDp || cfg.algorithm == Algorithm::Oracle) {
    const auto path = cfg.out_dir / (cfg.algorithm == Algorithm::ExactDp ? "solve.csv" : "oracle.csv");
    auto out = open_out(path);
    if (cfg.algorithm == Algorithm::ExactDp)
      out << "risk,oce_star,b_star,report_star,best_markovian,oracle,abs_diff\n";
    else
      out << "risk,oracle,dp,abs_diff,policies,distinct_laws\n";
    for (const auto& u : utilities) {
      auto row = optimum_row(mdp, lattice, u);
      row.finals = {row.report_star};
      row.stats = summarize(row.finals);
      OracleOptions oo;
      oo.policy_cap = cfg.policy_cap;
      if (cfg.algorithm == Algorithm::ExactDp) {
        std::string oracle_cell, diff_cell;
        if (count_history_policies(mdp) <= cfg.policy_cap) {
          const double ov = brute_force_oracle(mdp, u, oo).value;
          oracle_cell = csv_number(ov);
          diff_cell = csv_number(std::abs(ov - row.oce_star));
        }
        out << row.risk << ',' << csv_number(row.oce_star) << ',' << csv_number(row.b_star) << ','
            << csv_number(row.report_star) << ',' << csv_number(row.best_markovian) << ',' << oracle_cell
            << ',' << diff_cell << '\n';
      } else {
        OracleResult orc = [&] {
          try {
            return brute_force_oracle(mdp, u, oo);
          } catch (const RefusalError& e) {
            throw ConfigError(e.what());
          }
        }();
        out << row.risk << ',' << csv_number(orc.value) << ',' << csv_number(row.oce_star) << ','
            << csv_number(std::abs(orc.value - row.oce_star)) << ',' << orc.policy_count << ','
            << orc.distinct_distributions << '\n';
      }
      result.rows.push_back(std::move(row));
    }
    result.files.push_back(path);
    return result;
  }

  // Open every output before computing anything.
  std::vector<std::filesystem::path> round_paths;
  std::vector<std::ofstream> round_files;
  for (const auto& u : utilities) {
    round_paths.push_back(cfg.out_dir / (algo + "_" + u.label() + "_rounds.csv"));
    round_files.push_back(open_out(round_paths.back()));
  }
  const auto summary_path = cfg.out_dir / (algo + "_summary.csv");
  const auto manifest_path = cfg.out_dir / (algo + "_manifest.txt");
  auto summary = open_out(summary_path);
  auto manifest = open_out(manifest_path);

  summary << "risk,metric,n_seeds,mean,sd,ci_half,ci_low,ci_high,oce_star,report_star,best_markovian\n";
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const auto& u = utilities[i];
    std::vector<std::future<SeedTrace>> jobs;
    for (auto seed : cfg.seeds)
      jobs.push_back(std::async(std::launch::async, run_seed, std::cref(cfg), std::cref(mdp),
                                std::cref(lattice), std::cref(u), seed));
    auto row = optimum_row(mdp, lattice, u);
    auto& out = round_files[i];
    out << "round,seed,b_hat,oce_exact,rlb_or_vhat,regret_cum\n";
    for (auto& job : jobs) {
      const auto trace = job.get();
      for (const auto& line : trace.lines) out << line << '\n';
      row.finals.push_back(trace.final_report);
    }
    row.stats = summarize(row.finals);
    summary << row.risk << ',' << row.metric << ',' << row.finals.size() << ','
            << csv_number(row.stats.mean) << ',' << csv_number(row.stats.sd) << ','
            << csv_number(row.stats.half) << ',' << csv_number(row.stats.mean - row.stats.half) << ','
            << csv_number(row.stats.mean + row.stats.half) << ',' << csv_number(row.oce_star) << ','
            << csv_number(row.report_star) << ',' << csv_number(row.best_markovian) << '\n';
    result.rows.push_back(std::move(row));
    result.files.push_back(round_paths[i]);
  }
  write_manifest(manifest, cfg);
  result.files.push_back(summary_path);
  result.files.push_back(manifest_path);
  return result;
}

}  // namespace ocerl
