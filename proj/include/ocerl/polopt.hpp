#pragma once

// Policy-optimization meta-algorithm with a tabular softmax NPG oracle.
//
// For softmax policies NPG coincides with soft policy iteration,
//   theta <- theta + eta * Q_aug^{pi},   pi^{k+1} ∝ pi^k exp(eta Q_aug^{pi^k}),
// so no Fisher matrix is formed. Q_aug is exact by default; a sampled mode
// estimates it from rollouts instead.

#include "ocerl/augdp.hpp"
#include "ocerl/mdp.hpp"
#include "ocerl/policy.hpp"
#include "ocerl/risk.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ocerl {

class SoftmaxPolicyParams {
 public:
  /// Uniform logits (all zero).
  SoftmaxPolicyParams(int horizon, int n_states, std::size_t n_budgets, int n_actions, double eta);

  int horizon() const noexcept { return horizon_; }
  int n_states() const noexcept { return n_states_; }
  std::size_t n_budgets() const noexcept { return n_budgets_; }
  int n_actions() const noexcept { return n_actions_; }
  double eta() const noexcept { return eta_; }
  int round() const noexcept { return round_; }

  std::span<const double> logits(int h, int s, std::size_t k) const {
    return {theta_.data() + slot(h, s, k), static_cast<std::size_t>(n_actions_)};
  }

  /// theta += eta * q on every row, then shift each row so its max is 0.
  void apply(const QTable& q);

  AugPolicy policy() const;

  bool operator==(const SoftmaxPolicyParams&) const = default;

 private:
  std::size_t slot(int h, int s, std::size_t k) const {
    return ((static_cast<std::size_t>(h) * n_states_ + s) * n_budgets_ + k) * n_actions_;
  }

  int horizon_;
  int n_states_;
  std::size_t n_budgets_;
  int n_actions_;
  double eta_;
  int round_ = 0;
  std::vector<double> theta_;
};

/// H log|A|.
double default_eta(const TabularMDP& mdp);

/// One soft policy iteration step with exact Q_aug of the current policy.
SoftmaxPolicyParams npg_step(const SoftmaxPolicyParams& params, const TabularMDP& mdp,
                             const BudgetLattice& lattice, const UtilitySpec& u);

/// Monte-Carlo Q_aug: n rollouts per (h, s, b, a), each taking a and then
/// following `policy` to the end and scoring u(-b_{H+1}).
QTable sampled_q(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                 const AugPolicy& policy, int n_rollouts, std::mt19937_64& rng);

/// argmax over b in the return support of b + v1[b], smallest b on ties.
std::size_t select_budget_po(std::span<const double> v1, const BudgetLattice& lattice);

/// max over b in the return support of b + V^pi_1(s_1, b), V exact.
double compute_rlb(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                   const AugPolicy& policy);

struct RlbLog {
  int round;  // 1-based
  double rlb;
  double b_hat;
  std::size_t b_hat_index;
  double oce;          // exact OCE of (pi^k, b_hat)
  double report;       // reporting metric of the same return law
  double delta;        // RLB^{k+1} - RLB^k
  double mixed_value;  // mean over the return support of V^pi_1(s_1, b)
};

struct PoOptions {
  int rounds = 300;
  /// Non-positive selects default_eta().
  double eta = 0.0;
  std::uint64_t seed = 0;
  /// 0 evaluates Q_aug exactly; otherwise rollouts per (h, s, b, a).
  int sampled_rollouts = 0;
  double refine_tol = kDefaultRefineTol;
};

struct PoRun {
  std::vector<RlbLog> logs;
  double oce_star;
  SoftmaxPolicyParams final_params;
};

PoRun run_meta_po(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                  const PoOptions& options);

}  // namespace ocerl
