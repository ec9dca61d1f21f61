#pragma once

// Optimistic meta-algorithm with a UCB-VI oracle in the augmented MDP.
//
// Each round plans optimistically from transition counts (rewards are known),
// picks the initial budget maximizing b + V_hat_1(s_1, b), rolls out one
// trajectory and updates the counts. Only the original MDP's transitions are
// learned; the budget dynamics are known and deterministic.

#include "ocerl/augdp.hpp"
#include "ocerl/mdp.hpp"
#include "ocerl/risk.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ocerl {

struct UcbviOptions {
  double delta = 0.05;
  /// Multiplies sqrt(log(HSAK/delta) / N(s,a)).
  double bonus_scale = 1.0;
  /// Count transitions per step instead of pooling over h.
  bool per_step_counts = false;
  /// Clip at V^max_u instead of the tighter max over lattice budgets of u(-b).
  bool loose_clip = false;
};

class UcbviState {
 public:
  /// `rounds` is the K inside the log term.
  UcbviState(const TabularMDP& mdp, int rounds, UcbviOptions options = {});

  const UcbviOptions& options() const noexcept { return options_; }
  int rounds() const noexcept { return rounds_; }

  void record(const Trajectory& traj);

  /// Raw visit count of (s, a, s'); h is ignored when counts are pooled.
  std::int64_t count(int h, int s, int a, int next) const;
  /// max(1, sum_s' N(s, a, s')).
  double guarded_count(int h, int s, int a) const;
  /// Sum of all raw counts; grows by H per recorded trajectory.
  std::int64_t total_visits() const;

  /// Empirical transition row; all zeros before the first visit.
  std::vector<double> p_hat(int h, int s, int a) const;
  double bonus(int h, int s, int a) const;

  /// Replace the empirical model by the true transitions (testing hook for
  /// the oracle-reduction check).
  void inject_transitions(const TabularMDP& mdp);
  void set_bonus_scale(double scale) { options_.bonus_scale = scale; }

 private:
  std::size_t cell(int h, int s, int a) const;

  int horizon_;
  int n_states_;
  int n_actions_;
  int rounds_;
  UcbviOptions options_;
  double log_term_;
  std::vector<std::int64_t> counts_;  // [cell][s']
  std::optional<std::vector<double>> injected_;
};

struct UcbviPlan {
  AugValueTable values;
  AugPolicy policy;
};

/// Optimistic backward induction with V_hat_{H+1}(s, b) = u(-b),
/// Q_hat = P_hat^T E_r[V_hat_{h+1}(., b - r)] + bonus, greedy policy on the
/// unclipped Q_hat and V_hat = min(Q_hat(greedy), clip).
UcbviPlan ucbvi_plan(const UcbviState& state, const TabularMDP& mdp, const BudgetLattice& lattice,
                     const UtilitySpec& u);

/// Upper clip used by ucbvi_plan().
double ucbvi_clip(const UcbviState& state, const BudgetLattice& lattice, const UtilitySpec& u);

/// argmax over lattice points in [min B, max B] of b + v1[b], smallest b on ties.
std::size_t select_budget_optimistic(std::span<const double> v1, const BudgetLattice& lattice);

struct RoundLog {
  int round;  // 1-based
  double b_hat;
  std::size_t b_hat_index;
  double v_hat;      // V_hat_1(s_1, b_hat)
  double oce;        // exact OCE of (pi^k, b_hat)
  double report;     // reporting metric of the same return law
  double regret;     // OCE* - oce
  double cum_regret;
  double trajectory_return;
};

struct OptimistOptions {
  int rounds = 2000;
  std::uint64_t seed = 0;
  UcbviOptions ucbvi{};
  double refine_tol = kDefaultRefineTol;
};

struct OptimistRun {
  std::vector<RoundLog> logs;
  double oce_star;
  UcbviState state;
  AugPolicy final_policy;
  std::size_t final_budget;
};

/// Meta-algorithm loop; every round logs the exact OCE of (pi^k, b_hat_k).
OptimistRun run_meta_optimistic(const TabularMDP& mdp, const BudgetLattice& lattice,
                                const UtilitySpec& u, const OptimistOptions& options);

/// Greedy policy from the learned model with the bonus switched off, at its
/// own best budget; returns its exact OCE.
double greedy_learned_oce(const UcbviState& state, const TabularMDP& mdp,
                          const BudgetLattice& lattice, const UtilitySpec& u);

}  // namespace ocerl
