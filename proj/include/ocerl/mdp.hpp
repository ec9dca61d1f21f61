#pragma once

// Finite-horizon tabular MDPs with finite-support rewards on an integer
// quantum grid, the budget lattice they induce, and seeded rollouts.

#include "ocerl/policy.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace ocerl {

/// One reward outcome: value = ticks * quantum.
struct RewardAtom {
  std::int64_t ticks;
  double prob;

  bool operator==(const RewardAtom&) const = default;
};

/// Steps, states and actions are 0-based. Rewards are non-negative integer
/// multiples of quantum(). Immutable after construction.
class TabularMDP {
 public:
  TabularMDP(int n_states, int n_actions, int horizon, double quantum, int init_state,
             std::vector<double> transitions, std::vector<std::vector<RewardAtom>> rewards);

  int n_states() const noexcept { return n_states_; }
  int n_actions() const noexcept { return n_actions_; }
  int horizon() const noexcept { return horizon_; }
  double quantum() const noexcept { return quantum_; }
  int init_state() const noexcept { return init_state_; }

  /// P_h(. | s, a) over next states.
  std::span<const double> transition_row(int h, int s, int a) const;
  double transition(int h, int s, int a, int next) const {
    return transition_row(h, s, a)[static_cast<std::size_t>(next)];
  }

  /// R_h(s, a), atoms sorted by ticks.
  const std::vector<RewardAtom>& reward(int h, int s, int a) const;

  /// Largest reward tick at step h over all (s, a).
  std::int64_t max_reward_ticks(int h) const;

  double reward_value(std::int64_t ticks) const { return static_cast<double>(ticks) * quantum_; }

  bool operator==(const TabularMDP&) const = default;

 private:
  std::size_t sa(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * n_states_ + s) * n_actions_ + a;
  }

  int n_states_;
  int n_actions_;
  int horizon_;
  double quantum_;
  int init_state_;
  std::vector<double> transitions_;              // [h][s][a][s']
  std::vector<std::vector<RewardAtom>> rewards_;  // [h][s][a]
};

/// Incremental construction with real-valued rewards; build() snaps rewards
/// to the quantum grid and validates everything.
class MdpBuilder {
 public:
  MdpBuilder(int n_states, int n_actions, int horizon, double quantum, int init_state = 0);

  MdpBuilder& transition(int h, int s, int a, std::vector<double> row);
  /// Deterministic move to `next`.
  MdpBuilder& transition_to(int h, int s, int a, int next);
  MdpBuilder& reward(int h, int s, int a, std::vector<std::pair<double, double>> value_probs);

  TabularMDP build() const;

 private:
  std::size_t sa(int h, int s, int a) const;

  int n_states_;
  int n_actions_;
  int horizon_;
  double quantum_;
  int init_state_;
  std::vector<std::vector<double>> transitions_;
  std::vector<std::vector<std::pair<double, double>>> rewards_;
};

/// Integer grid of budgets.
///
/// The budget step is quantum / refine. Ticks below are budget ticks (units of
/// the budget step) unless stated otherwise. The lattice spans
/// [min B - sum_h max r_h, max B], so b - r never leaves it for any initial
/// budget inside [min B, max B].
class BudgetLattice {
 public:
  BudgetLattice(double reward_quantum, int refine, std::int64_t lo_ticks, std::int64_t hi_ticks,
                std::vector<std::int64_t> support_reward_ticks);

  double quantum() const noexcept { return reward_quantum_ / refine_; }
  double reward_quantum() const noexcept { return reward_quantum_; }
  int refine() const noexcept { return refine_; }
  std::int64_t lo_ticks() const noexcept { return lo_; }
  std::int64_t hi_ticks() const noexcept { return hi_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(hi_ - lo_ + 1); }

  double b_min() const { return value(0); }
  double b_max() const { return value(size() - 1); }

  double value(std::size_t k) const { return static_cast<double>(lo_ + static_cast<std::int64_t>(k)) * quantum(); }
  std::size_t index_of_ticks(std::int64_t budget_ticks) const;
  /// Index of a budget value; throws ArgumentError when it is off the lattice.
  std::size_t index_of(double budget) const;

  /// Reward ticks (units of the reward quantum) to budget ticks.
  std::int64_t step(std::int64_t reward_ticks) const { return reward_ticks * refine_; }

  /// Achievable total returns B, in reward ticks, ascending.
  const std::vector<std::int64_t>& support() const noexcept { return support_; }
  std::vector<double> support_values() const;

  /// Lattice indices with min B <= b <= max B, the initial-budget search range.
  std::vector<std::size_t> initial_indices() const;

  /// Candidate initial budgets for the policy-optimization meta-algorithm:
  /// exactly B when refine == 1, otherwise every index in initial_indices().
  std::vector<std::size_t> candidate_indices() const;

 private:
  double reward_quantum_;
  int refine_;
  std::int64_t lo_;
  std::int64_t hi_;
  std::vector<std::int64_t> support_;
};

/// Forward closure of reachable partial sums over all actions and transitions.
BudgetLattice build_lattice(const TabularMDP& mdp, int refine = 1);

struct TrajectoryStep {
  int state;
  std::size_t budget;  // lattice index
  int action;
  std::int64_t reward_ticks;
  int next_state;

  bool operator==(const TrajectoryStep&) const = default;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::int64_t return_ticks = 0;  // reward ticks

  bool operator==(const Trajectory&) const = default;
};

/// Counter-based seed derivation: every (round, purpose) pair gets its own
/// independent engine, so results do not depend on execution order.
class SeedStream {
 public:
  enum class Purpose : std::uint64_t { Rollout = 1, SampledQ = 2, Generator = 3 };

  explicit SeedStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t key(std::uint64_t round, Purpose purpose) const;
  std::mt19937_64 engine(std::uint64_t round, Purpose purpose) const;

 private:
  std::uint64_t seed_;
};

/// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);

/// Index drawn from a probability vector by inverse CDF.
std::size_t sample_index(std::span<const double> probs, std::mt19937_64& rng);

/// Rolls the policy out from (s_1, b1_index); b_{h+1} = b_h - r_h is tracked
/// exactly on the lattice.
Trajectory sample_trajectory(const TabularMDP& mdp, const BudgetLattice& lattice,
                             const AugPolicy& policy, std::size_t b1_index, std::mt19937_64& rng);

}  // namespace ocerl
