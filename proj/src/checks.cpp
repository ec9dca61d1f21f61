#include "ocerl/checks.hpp"

#include "ocerl/augdp.hpp"
#include "ocerl/envs.hpp"
#include "ocerl/errors.hpp"
#include "ocerl/experiment.hpp"
#include "ocerl/oracle.hpp"
#include "ocerl/polopt.hpp"
#include "ocerl/risk.hpp"
#include "ocerl/spec_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace ocerl {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<UtilitySpec> all_kinds() {
  return {UtilitySpec::mean(),        UtilitySpec::cvar(0.3),          UtilitySpec::entropic(-1.5),
          UtilitySpec::mean_variance(1.0), UtilitySpec::mean_cvar(0.3, 2.0)};
}

// Equally weighted joint scenarios for two random variables on [0, 1].
struct Joint {
  std::vector<double> x, y, w;
};

Joint random_joint(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = std::uniform_int_distribution<int>(1, 6)(rng);
  Joint j;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    j.x.push_back(unit(rng));
    j.y.push_back(unit(rng));
    j.w.push_back(0.05 + unit(rng));
    total += j.w.back();
  }
  for (auto& w : j.w) w /= total;
  return j;
}

DiscreteDist law(const std::vector<double>& v, const std::vector<double>& w) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < v.size(); ++i) atoms.push_back({v[i], w[i]});
  return DiscreteDist(std::move(atoms));
}

CheckOutcome axiom_checks(std::uint64_t seed) {
  std::mt19937_64 rng(SeedStream(seed).key(0, SeedStream::Purpose::Generator));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  std::string where;
  auto note = [&](double violation, const std::string& what) {
    if (violation > worst) {
      worst = violation;
      where = what;
    }
  };
  for (const auto& u : all_kinds())
    for (int t = 0; t < 200; ++t) {
      const auto j = random_joint(rng);
      const auto d = law(j.x, j.w);
      const double base = oce_dual(u, d).value;
      for (double s : {-0.5, 0.25})
        note(std::abs(oce_dual(u, d.shifted(s)).value - (base + s)) - 1e-9, u.label() + " translation");
      auto bumped = j.x;
      bumped[static_cast<std::size_t>(t) % bumped.size()] += 0.1;
      note(base - oce_dual(u, law(bumped, j.w)).value - 1e-12, u.label() + " monotonicity");
      const double lam = unit(rng);
      std::vector<double> z;
      for (std::size_t i = 0; i < j.x.size(); ++i) z.push_back(lam * j.x[i] + (1.0 - lam) * j.y[i]);
      const double ox = base;
      const double oy = oce_dual(u, law(j.y, j.w)).value;
      note(lam * ox + (1.0 - lam) * oy - oce_dual(u, law(z, j.w)).value - 1e-9, u.label() + " concavity");
      const double c = unit(rng);
      note(std::abs(oce_dual(u, DiscreteDist::point(c)).value - c) - 1e-9, u.label() + " consistency");
    }
  return {"oce axioms (translation, monotonicity, concavity, consistency)", worst <= 0.0,
          worst <= 0.0 ? "1000 distributions" : where + fmt(" violated by %.3g", worst)};
}

CheckOutcome mean_cvar_check(std::uint64_t seed) {
  std::mt19937_64 rng(SeedStream(seed).key(1, SeedStream::Purpose::Generator));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double k1 = 0.95 * unit(rng);
    const double k2 = 1.0 + 0.05 + 4.0 * unit(rng);
    const auto j = random_joint(rng);
    const auto [lhs, rhs] = mean_cvar_identity_check(k1, k2, law(j.x, j.w));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {"mean-cvar identity", worst <= 1e-10, fmt("max |diff| %.3g over 100 triples", worst)};
}

CheckOutcome oracle_agreement_check(std::uint64_t seed) {
  double worst = 0.0;
  int done = 0;
  for (std::uint64_t i = 0; done < 20 && i < 400; ++i) {
    RandomMdpOptions o;
    const auto mdp = random_mdp(seed * 1000 + i, o);
    if (count_history_policies(mdp) > 50'000) continue;
    const auto lattice = build_lattice(mdp, 1);
    const auto [z0, z1] = return_range(mdp);
    for (const auto& u : {UtilitySpec::cvar(0.25, z0, z1), UtilitySpec::entropic(-1.0, z0, z1)}) {
      const auto r = verify_against_oracle(mdp, lattice, u);
      const double tol = u.kind() == UtilityKind::Entropic ? 1e-6 : 1e-8;
      worst = std::max(worst, r.abs_diff / tol);
    }
    ++done;
  }
  return {"augmented DP matches brute force", worst <= 1.0 && done == 20,
          fmt("%.0f random MDPs, worst |diff|/tol %.3g", done, worst)};
}

CheckOutcome roundtrip_check() {
  const auto mdp = build_synthetic_mdp();
  const bool same = parse_mdp_spec(write_mdp_spec(mdp)) == mdp;
  return {"spec file round trip", same, same ? "synthetic MDP reparses identically" : "mismatch"};
}

CheckOutcome rlb_check() {
  const auto mdp = build_synthetic_mdp();
  const auto lattice = build_lattice(mdp, 1);
  const auto [z0, z1] = return_range(mdp);
  double min_delta = INFINITY;
  double max_gap = -INFINITY;
  for (const auto& u : benchmark_utilities(z0, z1)) {
    PoOptions o;
    o.rounds = 50;
    for (const auto& l : run_meta_po(mdp, lattice, u, o).logs) {
      min_delta = std::min(min_delta, l.delta);
      max_gap = std::max(max_gap, l.rlb - l.oce);
    }
  }
  return {"risk lower bound monotone and below the OCE", min_delta >= -1e-12 && max_gap <= 1e-9,
          fmt("min delta %.3g, max rlb - oce %.3g", min_delta, max_gap)};
}

CheckOutcome in_band(const std::string& name, double value, double lo, double hi) {
  return {name, value >= lo && value <= hi, fmt("%.6f", value) + fmt(" in [%.3f, %.3f]", lo, hi)};
}

}  // namespace

std::vector<CheckOutcome> run_property_checks(std::uint64_t seed) {
  return {axiom_checks(seed), mean_cvar_check(seed), oracle_agreement_check(seed), roundtrip_check(),
          rlb_check()};
}

std::vector<CheckOutcome> run_bench(const BenchOptions& options) {
  std::vector<CheckOutcome> out;
  const auto mdp = build_synthetic_mdp();
  const auto lattice = build_lattice(mdp, 1);
  const int S = mdp.n_states();
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + options.out_dir.string());

  // Return laws of the two Markov policies and the history-dependent one.
  const auto b1 = lattice.index_of(1.5);
  auto markov = [&](int a) {
    std::vector<int> acts(static_cast<std::size_t>(mdp.horizon() * S), a);
    return AugPolicy::markov(mdp.horizon(), S, lattice.size(), mdp.n_actions(), acts);
  };
  const auto opt = dp_optimal(mdp, lattice, UtilitySpec::cvar(0.25, 0.0, 2.5));
  struct Row {
    const char* name;
    DiscreteDist dist;
    double expected;
  };
  const std::vector<Row> laws{
      {"a1 (Markov)", exact_return_distribution(mdp, lattice, markov(0), b1), 0.5},
      {"a2 (Markov)", exact_return_distribution(mdp, lattice, markov(1), b1), 0.5},
      {"history", exact_return_distribution(mdp, lattice, opt.policy, b1), 0.75}};
  {
    std::ofstream f(options.out_dir / "return_laws.csv", std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write return_laws.csv");
    f << "policy,distribution,cvar_0.25\n";
    for (const auto& r : laws) {
      std::string atoms;
      for (const auto& a : r.dist.atoms())
        atoms += (atoms.empty() ? "" : " ") + csv_number(a.value) + ":" + csv_number(a.prob);
      const double c = cvar_closed_form(0.25, r.dist);
      f << r.name << ',' << atoms << ',' << csv_number(c) << '\n';
      out.push_back({std::string("return law ") + r.name, std::abs(c - r.expected) <= 1e-12,
                     fmt("CVaR_0.25 %.6f, expected %.2f", c, r.expected)});
    }
  }

  // Learning benchmark over the six risks.
  ExperimentConfig cfg;
  cfg.out_dir = options.out_dir;
  cfg.seeds = options.seeds;
  cfg.refine = options.refine;
  cfg.algorithm = Algorithm::Ucbvi;
  cfg.rounds = options.ucbvi_rounds;
  const auto ucb = run_experiment(cfg);
  cfg.algorithm = Algorithm::Npg;
  cfg.rounds = options.npg_rounds;
  const auto npg = run_experiment(cfg);

  struct Band {
    double ucb_lo, ucb_hi, npg_min, markov;
    bool strict_gap;
  };
  // Rows in benchmark_utilities() order.
  const std::vector<Band> bands{{1.03, 1.11, 1.055, 0.95, true}, {0.77, 0.85, 0.71, 0.5, true},
                                {1.21, 1.29, 1.215, 1.25, false}, {0.85, 0.95, 0.895, 0.91, false},
                                {0.70, 0.80, 0.67, 0.5, true},   {1.06, 1.18, 1.105, 1.0, true}};
  std::ofstream f(options.out_dir / "benchmark.csv", std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write benchmark.csv");
  f << "risk,best_markovian,optimum,ucbvi_mean,ucbvi_ci_half,npg_mean,npg_ci_half\n";
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& u = ucb.rows[i];
    const auto& p = npg.rows[i];
    const auto& b = bands[i];
    f << u.risk << ',' << csv_number(u.best_markovian) << ',' << csv_number(u.report_star) << ','
      << csv_number(u.stats.mean) << ',' << csv_number(u.stats.half) << ',' << csv_number(p.stats.mean)
      << ',' << csv_number(p.stats.half) << '\n';
    out.push_back(in_band("benchmark ucbvi " + u.risk, u.stats.mean, b.ucb_lo, b.ucb_hi));
    out.push_back(in_band("benchmark npg " + u.risk, p.stats.mean, b.npg_min, INFINITY));
    const double gap = u.report_star - u.best_markovian;
    out.push_back({"benchmark markovian gap " + u.risk, b.strict_gap ? gap > 1e-6 : std::abs(gap) <= 1e-6,
                   fmt("best Markovian %.6f, optimum %.6f", u.best_markovian, u.report_star)});
    out.push_back({"benchmark best markovian " + u.risk, std::abs(u.best_markovian - b.markov) <= 0.005,
                   fmt("%.6f vs reference %.2f", u.best_markovian, b.markov)});
  }
  return out;
}

}  // namespace ocerl
