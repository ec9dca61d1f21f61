#pragma once

// Exact dynamic programming in the budget-augmented MDP.
//
// Augmented states are (s, b) with b_{h+1} = b_h - r_h. Intermediate
// augmented rewards are zero and the utility enters only through the
// boundary layer V_{H+1}(s, b) = u(-b), so
//   Q_h(s, b, a) = sum_r R_h(r|s,a) sum_s' P_h(s'|s,a) V_{h+1}(s', b - r).

#include "ocerl/mdp.hpp"
#include "ocerl/policy.hpp"
#include "ocerl/risk.hpp"

#include <span>
#include <vector>

namespace ocerl {

/// V[h][s][k] for h in [0, H], budgets at lattice.value(k) + offset().
class AugValueTable {
 public:
  AugValueTable(int horizon, int n_states, std::size_t n_budgets, double offset = 0.0);

  int horizon() const noexcept { return horizon_; }
  int n_states() const noexcept { return n_states_; }
  std::size_t n_budgets() const noexcept { return n_budgets_; }
  double offset() const noexcept { return offset_; }

  double& at(int h, int s, std::size_t k) { return v_[slot(h, s) + k]; }
  double at(int h, int s, std::size_t k) const { return v_[slot(h, s) + k]; }
  std::span<const double> row(int h, int s) const { return {v_.data() + slot(h, s), n_budgets_}; }
  std::span<double> row(int h, int s) { return {v_.data() + slot(h, s), n_budgets_}; }

  /// Sets the boundary layer h = H to u(-b).
  void fill_terminal(const BudgetLattice& lattice, const UtilitySpec& u);

  double max_abs_diff(const AugValueTable& other) const;

 private:
  std::size_t slot(int h, int s) const {
    return (static_cast<std::size_t>(h) * n_states_ + s) * n_budgets_;
  }

  int horizon_;
  int n_states_;
  std::size_t n_budgets_;
  double offset_;
  std::vector<double> v_;
};

/// Q[h][s][k][a] for h in [0, H).
class QTable {
 public:
  QTable(int horizon, int n_states, std::size_t n_budgets, int n_actions);

  int n_actions() const noexcept { return n_actions_; }
  std::span<double> row(int h, int s, std::size_t k) {
    return {q_.data() + slot(h, s, k), static_cast<std::size_t>(n_actions_)};
  }
  std::span<const double> row(int h, int s, std::size_t k) const {
    return {q_.data() + slot(h, s, k), static_cast<std::size_t>(n_actions_)};
  }

 private:
  std::size_t slot(int h, int s, std::size_t k) const {
    return ((static_cast<std::size_t>(h) * n_states_ + s) * n_budgets_ + k) * n_actions_;
  }

  int n_states_;
  std::size_t n_budgets_;
  int n_actions_;
  std::vector<double> q_;
};

struct AugSolution {
  AugValueTable values;
  QTable q;
  AugPolicy policy;
};

struct AugEvaluation {
  AugValueTable values;
  QTable q;
};

/// Ties closer than this (relative) count as equal; the lowest index wins.
inline constexpr double kTieTol = 1e-12;

/// Lowest index whose value is within kTieTol of the maximum.
std::size_t argmax_lowest(std::span<const double> values);

namespace detail {

/// sum_r R(r) sum_s' p(s') next[s'][k - r], clamping budget indices at 0.
/// The clamp only triggers for budgets unreachable from [min B, max B].
double expected_next(const TabularMDP& mdp, const BudgetLattice& lattice, int h, int s, int a,
                     std::span<const double> p_row, const AugValueTable& values, std::size_t k);

}  // namespace detail

/// Backward induction for V*, Q* and the greedy policy (lowest action index
/// on ties) on the lattice shifted by `offset`.
AugSolution dp_optimal(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                       double offset = 0.0);

/// Same backup with the action expectation taken under `policy`.
AugEvaluation dp_evaluate(const TabularMDP& mdp, const BudgetLattice& lattice,
                          const UtilitySpec& u, const AugPolicy& policy);

/// Law of Z = sum_h r_h when running `policy` from (s_1, b1_index), computed
/// by a forward pass over the joint law of (s_h, b_h).
DiscreteDist exact_return_distribution(const TabularMDP& mdp, const BudgetLattice& lattice,
                                       const AugPolicy& policy, std::size_t b1_index);

/// OCE of the history-dependent policy (policy, b1): the dual is re-maximized
/// over real b on the exact return law.
double oce_of_policy(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                     const AugPolicy& policy, std::size_t b1_index,
                     double refine_tol = kDefaultRefineTol);

struct BudgetChoice {
  std::size_t index;
  double objective;  // b + V(s_1, b)
};

/// argmax of lattice.value(k) + offset + v1[k] over `indices`, smallest b on ties.
BudgetChoice argmax_budget(std::span<const double> v1, const BudgetLattice& lattice,
                           std::span<const std::size_t> indices, double offset = 0.0);

struct OptimalOce {
  double value;          // max over real b of b + V*_1(s_1, b)
  double budget;         // maximizing b_1
  std::size_t b1_index;  // index of `budget` on the lattice shifted by policy.offset()
  AugPolicy policy;      // greedy optimal augmented policy
  double lattice_value;  // max over unshifted lattice points only
  std::size_t lattice_index;
};

/// Optimal OCE through the augmented MDP.
///
/// Piecewise-linear utilities attain the optimum on the lattice. For smooth
/// utilities the optimal budget is generally off-lattice, so the search
/// alternates b <- argmax_b g_pi(b) and pi <- greedy(b) on offset lattices
/// from every lattice start; each step cannot decrease b + V*(s_1, b).
OptimalOce solve_optimal_oce(const TabularMDP& mdp, const BudgetLattice& lattice,
                             const UtilitySpec& u, double refine_tol = kDefaultRefineTol);

}  // namespace ocerl
