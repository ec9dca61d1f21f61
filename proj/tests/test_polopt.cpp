#include "ocerl/augdp.hpp"
#include "ocerl/envs.hpp"
#include "ocerl/errors.hpp"
#include "ocerl/polopt.hpp"

#include <doctest.h>

#include <cmath>

using namespace ocerl;
using doctest::Approx;

namespace {

const UtilitySpec kCvar = UtilitySpec::cvar(0.25, 0.0, 2.5);

std::vector<UtilitySpec> risks() {
  return {UtilitySpec::mean_variance(1.0, 0.0, 2.5), UtilitySpec::mean_variance(2.0, 0.0, 2.5),
          UtilitySpec::entropic(-1.0, 0.0, 2.5),     UtilitySpec::entropic(-2.0, 0.0, 2.5),
          UtilitySpec::cvar(0.25, 0.0, 2.5),         UtilitySpec::cvar(0.5, 0.0, 2.5)};
}

}  // namespace

TEST_CASE("zero step size leaves the parameters unchanged") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const SoftmaxPolicyParams p(2, 2, lat.size(), 2, 0.0);
  auto next = npg_step(p, mdp, lat, kCvar);
  CHECK(next.round() == 1);
  for (int h = 0; h < 2; ++h)
    for (int s = 0; s < 2; ++s)
      for (std::size_t k = 0; k < lat.size(); ++k)
        for (double x : next.logits(h, s, k)) CHECK(x == 0.0);
  CHECK(next.policy() == p.policy());
}

TEST_CASE("single action policies stay put") {
  const auto mdp = constant_mdp(2, 1.0, 0.5);
  const auto lat = build_lattice(mdp);
  SoftmaxPolicyParams p(2, 1, lat.size(), 1, 3.0);
  const auto before = p.policy();
  for (int i = 0; i < 5; ++i) p = npg_step(p, mdp, lat, kCvar.with_range(0.0, 2.0));
  CHECK(p.policy() == before);
}

TEST_CASE("one step from uniform is a softmax of Q") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const double eta = 1.7;
  const SoftmaxPolicyParams p(2, 2, lat.size(), 2, eta);
  const auto q = dp_evaluate(mdp, lat, kCvar, p.policy()).q;
  const auto pi = npg_step(p, mdp, lat, kCvar).policy();
  for (int h = 0; h < 2; ++h)
    for (int s = 0; s < 2; ++s)
      for (std::size_t k = 0; k < lat.size(); ++k) {
        const auto qr = q.row(h, s, k);
        const double z = std::exp(eta * qr[0]) + std::exp(eta * qr[1]);
        CHECK(pi.probs(h, s, k)[0] == Approx(std::exp(eta * qr[0]) / z).epsilon(1e-12));
        CHECK(pi.probs(h, s, k)[1] == Approx(std::exp(eta * qr[1]) / z).epsilon(1e-12));
      }
}

TEST_CASE("soft policy iteration converges to the optimal actions") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  SoftmaxPolicyParams p(2, 2, lat.size(), 2, default_eta(mdp));
  for (int i = 0; i < 200; ++i) p = npg_step(p, mdp, lat, kCvar);
  const auto pi = p.policy();
  const auto sol = dp_optimal(mdp, lat, kCvar);
  // Augmented states reachable from the optimal budget 1.5.
  for (double b : {1.5}) CHECK(pi.greedy_action(0, 0, lat.index_of(b)) == sol.policy.greedy_action(0, 0, lat.index_of(b)));
  for (double b : {1.5, 0.5}) CHECK(pi.greedy_action(1, 1, lat.index_of(b)) == sol.policy.greedy_action(1, 1, lat.index_of(b)));
  CHECK(pi.probs(1, 1, lat.index_of(1.5))[0] > 0.999);
  CHECK(pi.probs(1, 1, lat.index_of(0.5))[1] > 0.999);
}

TEST_CASE("budget selection over the return support") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  const std::vector<double> zeros(lat.size(), 0.0);
  CHECK(lat.value(select_budget_po(zeros, lat)) == 2.5);
  const auto sol = dp_optimal(mdp, lat, kCvar);
  CHECK(lat.value(select_budget_po(sol.values.row(0, 0), lat)) == 1.5);
}

TEST_CASE("RLB of fixed policies") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  CHECK(compute_rlb(mdp, lat, kCvar, dp_optimal(mdp, lat, kCvar).policy) == Approx(0.75).epsilon(1e-12));
  CHECK(compute_rlb(mdp, lat, UtilitySpec::mean(0.0, 2.5), AugPolicy::uniform(2, 2, lat.size(), 2)) ==
        Approx(1.3125));
  const auto a2 = AugPolicy::markov(2, 2, lat.size(), 2, std::vector<int>{1, 1, 1, 1});
  CHECK(compute_rlb(mdp, lat, kCvar, a2) == Approx(0.5));
}

TEST_CASE("meta loop: RLB ascent and lower bound") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp, 8);
  for (const auto& u : risks()) {
    PoOptions o;
    o.rounds = 300;
    const auto run = run_meta_po(mdp, lat, u, o);
    REQUIRE(run.logs.size() == 300);
    CAPTURE(u.label());
    double prev_mixed = -INFINITY;
    for (const auto& l : run.logs) {
      CHECK(l.delta >= -1e-9);
      CHECK(l.rlb <= l.oce + 1e-9);
      CHECK(l.rlb <= run.oce_star + 1e-9);
      CHECK(l.mixed_value >= prev_mixed - 1e-9);
      prev_mixed = l.mixed_value;
    }
    for (std::size_t i = 1; i < run.logs.size(); ++i)
      CHECK(run.logs[i].rlb == Approx(run.logs[i - 1].rlb + run.logs[i - 1].delta).epsilon(1e-12));
    CHECK(run.oce_star - run.logs.back().rlb <= 0.02);
  }
}

TEST_CASE("single round and invalid options") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  PoOptions o;
  o.rounds = 1;
  const auto run = run_meta_po(mdp, lat, kCvar, o);
  REQUIRE(run.logs.size() == 1);
  CHECK(run.final_params.round() == 1);
  o.rounds = 0;
  CHECK_THROWS_AS(run_meta_po(mdp, lat, kCvar, o), ArgumentError);
  CHECK_THROWS_AS(SoftmaxPolicyParams(2, 2, 3, 2, -1.0), ArgumentError);
}

TEST_CASE("sampled Q mode is seeded") {
  const auto mdp = build_synthetic_mdp();
  const auto lat = build_lattice(mdp);
  PoOptions o;
  o.rounds = 20;
  o.sampled_rollouts = 64;
  o.seed = 5;
  const auto a = run_meta_po(mdp, lat, kCvar, o);
  const auto b = run_meta_po(mdp, lat, kCvar, o);
  CHECK(a.final_params == b.final_params);
  for (const auto& l : a.logs) CHECK(l.rlb <= a.oce_star + 1e-9);
  CHECK(a.logs.back().rlb >= 0.5);
}

TEST_CASE("sampled Q is unbiased for a deterministic MDP") {
  const auto mdp = constant_mdp(2, 1.0, 0.5);
  const auto lat = build_lattice(mdp);
  const auto u = UtilitySpec::mean(0.0, 2.0);
  std::mt19937_64 rng(0);
  const auto pi = AugPolicy::uniform(2, 1, lat.size(), 1);
  const auto q = sampled_q(mdp, lat, u, pi, 3, rng);
  const auto exact = dp_evaluate(mdp, lat, u, pi).q;
  for (auto k : lat.initial_indices()) CHECK(q.row(0, 0, k)[0] == Approx(exact.row(0, 0, k)[0]));
}
