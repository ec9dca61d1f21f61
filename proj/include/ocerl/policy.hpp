#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocerl {

/// Markov policy on the augmented state (h, s, budget index).
///
/// Entries hold an action distribution; an all-zero row means the policy is
/// undefined there. Budget indices refer to a BudgetLattice, shifted by
/// offset() when the policy was computed on an offset lattice.
class AugPolicy {
 public:
  enum class Kind { Deterministic, Softmax };

  AugPolicy(int horizon, int n_states, std::size_t n_budgets, int n_actions, Kind kind,
            double offset = 0.0);

  /// Budget-blind policy: actions[h * n_states + s] at every budget.
  static AugPolicy markov(int horizon, int n_states, std::size_t n_budgets, int n_actions,
                          std::span<const int> actions);

  /// Every action equally likely everywhere.
  static AugPolicy uniform(int horizon, int n_states, std::size_t n_budgets, int n_actions);

  int horizon() const noexcept { return horizon_; }
  int n_states() const noexcept { return n_states_; }
  std::size_t n_budgets() const noexcept { return n_budgets_; }
  int n_actions() const noexcept { return n_actions_; }
  Kind kind() const noexcept { return kind_; }
  double offset() const noexcept { return offset_; }

  std::span<const double> probs(int h, int s, std::size_t k) const;
  std::span<double> probs(int h, int s, std::size_t k);

  void set_action(int h, int s, std::size_t k, int a);
  bool defined(int h, int s, std::size_t k) const;

  /// Most likely action, lowest index on ties; -1 when undefined.
  int greedy_action(int h, int s, std::size_t k) const;

  bool operator==(const AugPolicy&) const = default;

 private:
  std::size_t slot(int h, int s, std::size_t k) const;

  int horizon_;
  int n_states_;
  std::size_t n_budgets_;
  int n_actions_;
  Kind kind_;
  double offset_;
  std::vector<double> probs_;
};

}  // namespace ocerl
