#include "oracles.hpp"

#include "ocerl/augdp.hpp"
#include "ocerl/envs.hpp"
#include "ocerl/errors.hpp"

#include <doctest.h>

#include <random>

using namespace ocerl;
using doctest::Approx;

namespace {

oracle::Law law_of(const DiscreteDist& d) {
  oracle::Law out;
  for (const auto& a : d.atoms()) out.emplace_back(a.value, a.prob);
  return out;
}

AugPolicy markov(const TabularMDP& mdp, const BudgetLattice& lat, std::vector<int> acts) {
  return AugPolicy::markov(mdp.horizon(), mdp.n_states(), lat.size(), mdp.n_actions(), acts);
}

const oracle::Law kMarkovA1{{0.0, 0.125}, {1.0, 0.125}, {1.5, 0.375}, {2.5, 0.375}};
const oracle::Law kMarkovA2{{0.5, 0.5}, {1.5, 0.5}};
const oracle::Law kHistory{{0.0, 0.125}, {1.5, 0.875}};

}  // namespace

TEST_CASE("return laws of the synthetic policies") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto b1 = lat.index_of(1.5);
  CHECK(law_of(exact_return_distribution(mdp, lat, markov(mdp, lat, {0, 0, 0, 0}), b1)) == kMarkovA1);
  CHECK(law_of(exact_return_distribution(mdp, lat, markov(mdp, lat, {1, 1, 1, 1}), b1)) == kMarkovA2);
  const auto opt = dp_optimal(mdp, lat, UtilitySpec::cvar(0.25, 0.0, 2.5));
  CHECK(law_of(exact_return_distribution(mdp, lat, opt.policy, b1)) == kHistory);
}

TEST_CASE("Markov laws agree with trajectory enumeration on random MDPs") {
  RandomMdpOptions o;
  o.n_states = 3;
  o.horizon = 3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mdp = random_mdp(seed, o);
    const auto lat = build_lattice(mdp);
    std::vector<int> acts(9);
    for (std::size_t i = 0; i < acts.size(); ++i) acts[i] = static_cast<int>((seed + i) % 2);
    const auto got = law_of(exact_return_distribution(mdp, lat, markov(mdp, lat, acts), lat.initial_indices().back()));
    const auto want = oracle::markov_law(mdp, acts);
    REQUIRE(got.size() == want.size());
    double total = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].first == want[i].first);
      CHECK(got[i].second == Approx(want[i].second).epsilon(1e-14));
      total += got[i].second;
    }
    CHECK(total == Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("terminal layer is u(-b)") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto u = UtilitySpec::cvar(0.25, 0.0, 2.5);
  const auto sol = dp_optimal(mdp, lat, u);
  for (std::size_t k = 0; k < lat.size(); ++k)
    for (int s = 0; s < 2; ++s) CHECK(sol.values.at(2, s, k) == u(-lat.value(k)));
}

TEST_CASE("optimal CVaR through the augmented MDP") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto u = UtilitySpec::cvar(0.25, 0.0, 2.5);
  const auto sol = dp_optimal(mdp, lat, u);
  const auto best = argmax_budget(sol.values.row(0, 0), lat, lat.initial_indices());
  CHECK(best.objective == Approx(0.75).epsilon(1e-12));
  CHECK(lat.value(best.index) == 1.5);
  // a1 after r1 = 0 (budget 1.5), a2 after r1 = 1 (budget 0.5).
  CHECK(sol.policy.greedy_action(1, 1, lat.index_of(1.5)) == 0);
  CHECK(sol.policy.greedy_action(1, 1, lat.index_of(0.5)) == 1);
  const auto opt = solve_optimal_oce(mdp, lat, u);
  CHECK(opt.value == Approx(0.75).epsilon(1e-12));
  CHECK(opt.budget == 1.5);
  CHECK(solve_optimal_oce(mdp, lat, UtilitySpec::cvar(0.5, 0.0, 2.5)).value == Approx(1.125).epsilon(1e-12));
}

TEST_CASE("DP values match plain recursion on real budgets") {
  RandomMdpOptions o;
  o.quantum = 0.25;
  o.n_states = 3;
  o.horizon = 3;
  const std::vector<std::pair<double, oracle::Utility>> kinds{
      {0.25, oracle::cvar_u(0.25)}, {-1.0, oracle::entropic_u(-1.0)}, {1.0, oracle::mv_u(1.0)}};
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto mdp = random_mdp(seed + 100, o);
    const auto lat = build_lattice(mdp);
    const double z1 = lat.b_max();
    const std::vector<UtilitySpec> specs{UtilitySpec::cvar(0.25, 0.0, z1), UtilitySpec::entropic(-1.0, 0.0, z1),
                                         UtilitySpec::mean_variance(1.0, 0.0, z1)};
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto sol = dp_optimal(mdp, lat, specs[i]);
      for (auto k : lat.initial_indices())
        CHECK(sol.values.at(0, 0, k) ==
              Approx(oracle::aug_value(mdp, kinds[i].second, 0, 0, lat.value(k))).epsilon(1e-12));
    }
  }
}

TEST_CASE("smooth utilities: off-lattice optimum") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto mv1 = solve_optimal_oce(mdp, lat, UtilitySpec::mean_variance(1.0, 0.0, 2.5));
  CHECK(mv1.value == Approx(1.06640625).epsilon(1e-9));
  CHECK(mv1.budget == Approx(1.3125).epsilon(1e-9));
  const auto mv2 = solve_optimal_oce(mdp, lat, UtilitySpec::mean_variance(2.0, 0.0, 2.5));
  CHECK(mv2.value == Approx(0.8203125).epsilon(1e-9));
  // On the 0.5 grid alone the quadratic optimum is not reachable.
  CHECK(mv2.lattice_value < mv2.value - 0.05);
  const auto e1 = solve_optimal_oce(mdp, lat, UtilitySpec::entropic(-1.0, 0.0, 2.5));
  CHECK(std::abs(e1.value - oracle::oce(oracle::entropic_u(-1.0), kMarkovA1)) <= 1e-8);
  const auto e2 = solve_optimal_oce(mdp, lat, UtilitySpec::entropic(-2.0, 0.0, 2.5));
  CHECK(std::abs(e2.value - oracle::oce(oracle::entropic_u(-2.0), kMarkovA1)) <= 1e-8);
}

TEST_CASE("solve_optimal_oce law realizes the optimum") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp, 8);
  for (const auto& u : {UtilitySpec::mean_variance(1.0, 0.0, 2.5), UtilitySpec::entropic(-2.0, 0.0, 2.5),
                        UtilitySpec::cvar(0.5, 0.0, 2.5)}) {
    const auto opt = solve_optimal_oce(mdp, lat, u);
    CHECK(oce_of_policy(mdp, lat, u, opt.policy, opt.b1_index) == Approx(opt.value).epsilon(1e-9));
  }
}

TEST_CASE("mean utility reduces to risk-neutral DP") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto u = UtilitySpec::mean(0.0, 2.5);
  const auto sol = dp_optimal(mdp, lat, u);
  for (auto k : lat.initial_indices()) CHECK(lat.value(k) + sol.values.at(0, 0, k) == Approx(1.625));
  // Action choice does not depend on the budget.
  for (std::size_t k = 0; k < lat.size(); ++k)
    if (lat.value(k) >= 0.0) CHECK(sol.policy.greedy_action(1, 1, k) == 0);
  CHECK(solve_optimal_oce(mdp, lat, u).value == Approx(1.625));
}

TEST_CASE("evaluating the greedy policy reproduces the optimal table") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp, 2);
  for (const auto& u : {UtilitySpec::cvar(0.25, 0.0, 2.5), UtilitySpec::entropic(-2.0, 0.0, 2.5)}) {
    const auto sol = dp_optimal(mdp, lat, u);
    const auto ev = dp_evaluate(mdp, lat, u, sol.policy);
    CHECK(ev.values.max_abs_diff(sol.values) <= 1e-12);
  }
}

TEST_CASE("Markov a2 policy has CVaR 0.5") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto u = UtilitySpec::cvar(0.25, 0.0, 2.5);
  const auto pi = markov(mdp, lat, {1, 1, 1, 1});
  const auto ev = dp_evaluate(mdp, lat, u, pi);
  CHECK(argmax_budget(ev.values.row(0, 0), lat, lat.initial_indices()).objective == Approx(0.5));
  CHECK(oce_of_policy(mdp, lat, u, pi, lat.index_of(1.0)) == Approx(0.5));
}

TEST_CASE("uniform policy expected return") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto ev = dp_evaluate(mdp, lat, UtilitySpec::mean(0.0, 2.5), AugPolicy::uniform(2, 2, lat.size(), 2));
  // 0.5 from step 1 plus (1.125 + 0.5) / 2 from step 2.
  CHECK(lat.value(8) + ev.values.at(0, 0, 8) == Approx(0.5 + 0.8125));
}

TEST_CASE("OCE of a policy bounds b + V from above") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  std::mt19937_64 rng(9);
  for (const auto& u : {UtilitySpec::cvar(0.25, 0.0, 2.5), UtilitySpec::entropic(-1.0, 0.0, 2.5),
                        UtilitySpec::mean_variance(2.0, 0.0, 2.5)})
    for (int t = 0; t < 16; ++t) {
      AugPolicy pi(2, 2, lat.size(), 2, AugPolicy::Kind::Deterministic);
      for (int h = 0; h < 2; ++h)
        for (int s = 0; s < 2; ++s)
          for (std::size_t k = 0; k < lat.size(); ++k) pi.set_action(h, s, k, static_cast<int>(rng() % 2));
      const auto ev = dp_evaluate(mdp, lat, u, pi);
      for (auto k : lat.initial_indices())
        CHECK(oce_of_policy(mdp, lat, u, pi, k) >= lat.value(k) + ev.values.at(0, 0, k) - 1e-12);
    }
}

TEST_CASE("argmax helpers break ties low") {
  const std::vector<double> q{1.0, 3.0, 3.0 + 1e-14, 2.0};
  CHECK(argmax_lowest(q) == 1);
  const auto lat = build_lattice(build_synthetic_mdp());
  const std::vector<double> zeros(lat.size(), 0.0);
  CHECK(lat.value(argmax_budget(zeros, lat, lat.initial_indices()).index) == 2.5);
  std::vector<double> flat(lat.size());
  for (std::size_t k = 0; k < lat.size(); ++k) flat[k] = 1.0 - lat.value(k);
  CHECK(lat.value(argmax_budget(flat, lat, lat.initial_indices()).index) == 0.0);
}

TEST_CASE("budgets below the support are rejected") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const auto pi = markov(mdp, lat, {0, 0, 0, 0});
  CHECK_THROWS_AS(exact_return_distribution(mdp, lat, pi, 0), ContractViolation);
  AugPolicy undefined(2, 2, lat.size(), 2, AugPolicy::Kind::Deterministic);
  CHECK_THROWS_AS(exact_return_distribution(mdp, lat, undefined, 8), ContractViolation);
  CHECK_THROWS_AS(dp_evaluate(mdp, lat, UtilitySpec::mean(), AugPolicy::uniform(2, 2, 3, 2)), ArgumentError);
}

TEST_CASE("point-mass MDP") {
  const auto mdp = constant_mdp(3, 0.5, 0.5);
  const auto lat = build_lattice(mdp);
  const auto u = UtilitySpec::entropic(-2.0, 0.0, 1.5);
  const auto opt = solve_optimal_oce(mdp, lat, u);
  CHECK(opt.value == Approx(1.5).epsilon(1e-9));
  const auto law = exact_return_distribution(mdp, lat, opt.policy, opt.b1_index);
  CHECK(law.size() == 1);
  CHECK(law.atoms()[0].value == 1.5);
}
