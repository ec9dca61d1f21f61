#pragma once

// Built-in environments.

#include "ocerl/mdp.hpp"

#include <cstdint>

namespace ocerl {

/// Two states, two actions, H = 2, reward quantum 0.5. From s1 both actions
/// pay 0 or 1 with probability 1/2 each and move to s2; in s2, a1 pays 1.5
/// with probability 3/4 (else 0) and a2 pays 0.5. Unreachable (h, s) pairs
/// pay 0 and stay in s2.
TabularMDP build_synthetic_mdp();

struct RandomMdpOptions {
  int n_states = 2;
  int n_actions = 2;
  int horizon = 2;
  double quantum = 0.5;
  /// Reward values are drawn from {0, q, ..., max_reward_ticks * q}.
  int max_reward_ticks = 3;
  int max_reward_atoms = 2;
  int max_successors = 2;
};

/// Random MDP with dyadic probabilities (multiples of 1/8), so every return
/// law is exact in binary floating point.
TabularMDP random_mdp(std::uint64_t seed, const RandomMdpOptions& options = {});

/// Single state and action; pays `value` at every step.
TabularMDP constant_mdp(int horizon, double value, double quantum);

}  // namespace ocerl
