#include "ocerl/augdp.hpp"

#include "ocerl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ocerl {

AugValueTable::AugValueTable(int horizon, int n_states, std::size_t n_budgets, double offset)
    : horizon_(horizon),
      n_states_(n_states),
      n_budgets_(n_budgets),
      offset_(offset),
      v_(static_cast<std::size_t>(horizon + 1) * n_states * n_budgets, 0.0) {}

void AugValueTable::fill_terminal(const BudgetLattice& lattice, const UtilitySpec& u) {
  for (int s = 0; s < n_states_; ++s)
    for (std::size_t k = 0; k < n_budgets_; ++k) at(horizon_, s, k) = u(-(lattice.value(k) + offset_));
}

double AugValueTable::max_abs_diff(const AugValueTable& other) const {
  if (other.v_.size() != v_.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) d = std::max(d, std::abs(v_[i] - other.v_[i]));
  return d;
}

QTable::QTable(int horizon, int n_states, std::size_t n_budgets, int n_actions)
    : n_states_(n_states),
      n_budgets_(n_budgets),
      n_actions_(n_actions),
      q_(static_cast<std::size_t>(horizon) * n_states * n_budgets * n_actions, 0.0) {}

std::size_t argmax_lowest(std::span<const double> values) {
  double best = -INFINITY;
  for (double v : values) best = std::max(best, v);
  const double eps = kTieTol * (1.0 + std::abs(best));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - eps) return i;
  return 0;
}

namespace detail {

double expected_next(const TabularMDP& mdp, const BudgetLattice& lattice, int h, int s, int a,
                     std::span<const double> p_row, const AugValueTable& values, std::size_t k) {
  double q = 0.0;
  for (const auto& r : mdp.reward(h, s, a)) {
    const auto next_k = std::max<std::int64_t>(static_cast<std::int64_t>(k) - lattice.step(r.ticks), 0);
    double ev = 0.0;
    for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
      const double p = p_row[static_cast<std::size_t>(s2)];
      if (p != 0.0) ev += p * values.at(h + 1, s2, static_cast<std::size_t>(next_k));
    }
    q += r.prob * ev;
  }
  return q;
}

}  // namespace detail

AugSolution dp_optimal(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                       double offset) {
  const int H = mdp.horizon();
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const std::size_t NB = lattice.size();
  AugSolution sol{AugValueTable(H, S, NB, offset), QTable(H, S, NB, A),
                  AugPolicy(H, S, NB, A, AugPolicy::Kind::Deterministic, offset)};
  sol.values.fill_terminal(lattice, u);
  for (int h = H - 1; h >= 0; --h)
    for (int s = 0; s < S; ++s)
      for (std::size_t k = 0; k < NB; ++k) {
        auto q = sol.q.row(h, s, k);
        for (int a = 0; a < A; ++a)
          q[static_cast<std::size_t>(a)] =
              detail::expected_next(mdp, lattice, h, s, a, mdp.transition_row(h, s, a), sol.values, k);
        const auto best = argmax_lowest(q);
        sol.policy.set_action(h, s, k, static_cast<int>(best));
        sol.values.at(h, s, k) = *std::max_element(q.begin(), q.end());
      }
  return sol;
}

AugEvaluation dp_evaluate(const TabularMDP& mdp, const BudgetLattice& lattice,
                          const UtilitySpec& u, const AugPolicy& policy) {
  const int H = mdp.horizon();
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const std::size_t NB = lattice.size();
  if (policy.horizon() != H || policy.n_states() != S || policy.n_actions() != A ||
      policy.n_budgets() != NB)
    throw ArgumentError("policy shape does not match the MDP and lattice");
  AugEvaluation ev{AugValueTable(H, S, NB, policy.offset()), QTable(H, S, NB, A)};
  ev.values.fill_terminal(lattice, u);
  for (int h = H - 1; h >= 0; --h)
    for (int s = 0; s < S; ++s)
      for (std::size_t k = 0; k < NB; ++k) {
        auto q = ev.q.row(h, s, k);
        const auto pi = policy.probs(h, s, k);
        double v = 0.0;
        for (int a = 0; a < A; ++a) {
          const auto ua = static_cast<std::size_t>(a);
          q[ua] = detail::expected_next(mdp, lattice, h, s, a, mdp.transition_row(h, s, a), ev.values, k);
          v += pi[ua] * q[ua];
        }
        ev.values.at(h, s, k) = v;
      }
  return ev;
}

DiscreteDist exact_return_distribution(const TabularMDP& mdp, const BudgetLattice& lattice,
                                       const AugPolicy& policy, std::size_t b1_index) {
  if (b1_index >= lattice.size()) throw ArgumentError("initial budget index outside the lattice");
  // Joint law of (s_h, budget index).
  std::map<std::pair<int, std::int64_t>, double> law{
      {{mdp.init_state(), static_cast<std::int64_t>(b1_index)}, 1.0}};
  for (int h = 0; h < mdp.horizon(); ++h) {
    std::map<std::pair<int, std::int64_t>, double> next;
    for (const auto& [key, mass] : law) {
      const auto [s, k] = key;
      const auto pi = policy.probs(h, s, static_cast<std::size_t>(k));
      if (!policy.defined(h, s, static_cast<std::size_t>(k)))
        throw ContractViolation("policy undefined at a reachable augmented state");
      for (int a = 0; a < mdp.n_actions(); ++a) {
        const double pa = pi[static_cast<std::size_t>(a)];
        if (pa == 0.0) continue;
        const auto row = mdp.transition_row(h, s, a);
        for (const auto& r : mdp.reward(h, s, a)) {
          const auto k2 = k - lattice.step(r.ticks);
          if (k2 < 0) throw ContractViolation("budget left the lattice; initial budget below min B");
          for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
            const double p = row[static_cast<std::size_t>(s2)];
            if (p != 0.0) next[{s2, k2}] += mass * pa * r.prob * p;
          }
        }
      }
    }
    law = std::move(next);
  }
  std::vector<std::pair<long long, double>> atoms;
  atoms.reserve(law.size());
  for (const auto& [key, mass] : law) {
    const auto budget_ticks = static_cast<std::int64_t>(b1_index) - key.second;
    atoms.emplace_back(budget_ticks / lattice.refine(), mass);
  }
  return DiscreteDist::from_lattice(atoms, lattice.reward_quantum());
}

double oce_of_policy(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                     const AugPolicy& policy, std::size_t b1_index, double refine_tol) {
  return oce_dual(u, exact_return_distribution(mdp, lattice, policy, b1_index), refine_tol).value;
}

BudgetChoice argmax_budget(std::span<const double> v1, const BudgetLattice& lattice,
                           std::span<const std::size_t> indices, double offset) {
  if (indices.empty()) throw ArgumentError("no candidate budgets");
  std::vector<double> obj;
  obj.reserve(indices.size());
  for (auto k : indices) obj.push_back(lattice.value(k) + offset + v1[k]);
  const auto i = argmax_lowest(obj);
  return {indices[i], *std::max_element(obj.begin(), obj.end())};
}

namespace {

struct ShiftedBudget {
  double offset;
  std::size_t index;
};

ShiftedBudget shift_for(const BudgetLattice& lattice, double b) {
  const double q = lattice.quantum();
  auto base = static_cast<std::int64_t>(std::floor(b / q));
  double offset = b - static_cast<double>(base) * q;
  if (offset >= q) {
    ++base;
    offset = 0.0;
  }
  base = std::clamp(base, lattice.lo_ticks(), lattice.hi_ticks());
  return {b - static_cast<double>(base) * q, static_cast<std::size_t>(base - lattice.lo_ticks())};
}

}  // namespace

OptimalOce solve_optimal_oce(const TabularMDP& mdp, const BudgetLattice& lattice,
                             const UtilitySpec& u, double refine_tol) {
  const int s1 = mdp.init_state();
  auto base = dp_optimal(mdp, lattice, u);
  const auto starts = lattice.initial_indices();
  const auto choice = argmax_budget(base.values.row(0, s1), lattice, starts);
  OptimalOce best{choice.objective, lattice.value(choice.index), choice.index, base.policy,
                  choice.objective, choice.index};
  if (u.piecewise_linear()) return best;

  for (auto start : starts) {
    AugPolicy pi = base.policy;
    std::size_t b1 = start;
    double current = lattice.value(start) + base.values.at(0, s1, start);
    double budget = lattice.value(start);
    for (int iter = 0; iter < 64; ++iter) {
      const auto dual = oce_dual(u, exact_return_distribution(mdp, lattice, pi, b1), refine_tol);
      const auto shifted = shift_for(lattice, dual.b_star);
      auto sol = dp_optimal(mdp, lattice, u, shifted.offset);
      const double f = dual.b_star + sol.values.at(0, s1, shifted.index);
      if (!(f > current + 1e-15)) break;
      current = f;
      budget = dual.b_star;
      pi = std::move(sol.policy);
      b1 = shifted.index;
    }
    if (current > best.value + 1e-15) {
      best.value = current;
      best.budget = budget;
      best.b1_index = b1;
      best.policy = std::move(pi);
    }
  }
  return best;
}

}  // namespace ocerl
