#include "ocerl/optimist.hpp"

#include "ocerl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ocerl {

UcbviState::UcbviState(const TabularMDP& mdp, int rounds, UcbviOptions options)
    : horizon_(mdp.horizon()),
      n_states_(mdp.n_states()),
      n_actions_(mdp.n_actions()),
      rounds_(rounds),
      options_(options) {
  if (rounds < 1) throw ArgumentError("UCB-VI needs at least one round");
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (!(options.bonus_scale >= 0.0)) throw ArgumentError("bonus scale must be non-negative");
  log_term_ = std::log(static_cast<double>(horizon_) * n_states_ * n_actions_ * rounds / options.delta);
  const int layers = options.per_step_counts ? horizon_ : 1;
  counts_.assign(static_cast<std::size_t>(layers) * n_states_ * n_actions_ * n_states_, 0);
}

std::size_t UcbviState::cell(int h, int s, int a) const {
  const int layer = options_.per_step_counts ? h : 0;
  return ((static_cast<std::size_t>(layer) * n_states_ + s) * n_actions_ + a) * n_states_;
}

void UcbviState::record(const Trajectory& traj) {
  for (std::size_t h = 0; h < traj.steps.size(); ++h) {
    const auto& st = traj.steps[h];
    ++counts_[cell(static_cast<int>(h), st.state, st.action) + static_cast<std::size_t>(st.next_state)];
  }
}

std::int64_t UcbviState::count(int h, int s, int a, int next) const {
  return counts_[cell(h, s, a) + static_cast<std::size_t>(next)];
}

double UcbviState::guarded_count(int h, int s, int a) const {
  std::int64_t n = 0;
  for (int s2 = 0; s2 < n_states_; ++s2) n += count(h, s, a, s2);
  return static_cast<double>(std::max<std::int64_t>(1, n));
}

std::int64_t UcbviState::total_visits() const {
  std::int64_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

std::vector<double> UcbviState::p_hat(int h, int s, int a) const {
  std::vector<double> row(static_cast<std::size_t>(n_states_), 0.0);
  if (injected_) {
    const auto base = ((static_cast<std::size_t>(h) * n_states_ + s) * n_actions_ + a) * n_states_;
    std::copy_n(injected_->begin() + static_cast<std::ptrdiff_t>(base), n_states_, row.begin());
    return row;
  }
  const double n = guarded_count(h, s, a);
  for (int s2 = 0; s2 < n_states_; ++s2)
    row[static_cast<std::size_t>(s2)] = static_cast<double>(count(h, s, a, s2)) / n;
  return row;
}

double UcbviState::bonus(int h, int s, int a) const {
  return options_.bonus_scale * std::sqrt(log_term_ / guarded_count(h, s, a));
}

void UcbviState::inject_transitions(const TabularMDP& mdp) {
  std::vector<double> p;
  for (int h = 0; h < mdp.horizon(); ++h)
    for (int s = 0; s < mdp.n_states(); ++s)
      for (int a = 0; a < mdp.n_actions(); ++a) {
        const auto row = mdp.transition_row(h, s, a);
        p.insert(p.end(), row.begin(), row.end());
      }
  injected_ = std::move(p);
}

double ucbvi_clip(const UcbviState& state, const BudgetLattice& lattice, const UtilitySpec& u) {
  if (state.options().loose_clip) return u.vmax();
  // u is non-decreasing, so the largest boundary value sits at the lowest budget.
  return u(-lattice.b_min());
}

UcbviPlan ucbvi_plan(const UcbviState& state, const TabularMDP& mdp, const BudgetLattice& lattice,
                     const UtilitySpec& u) {
  const int H = mdp.horizon();
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const std::size_t NB = lattice.size();
  const double clip = ucbvi_clip(state, lattice, u);
  UcbviPlan plan{AugValueTable(H, S, NB), AugPolicy(H, S, NB, A, AugPolicy::Kind::Deterministic)};
  plan.values.fill_terminal(lattice, u);
  std::vector<double> q(static_cast<std::size_t>(A));
  std::vector<std::vector<double>> p_rows(static_cast<std::size_t>(S * A));
  std::vector<double> bonuses(static_cast<std::size_t>(S * A));
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        p_rows[static_cast<std::size_t>(s * A + a)] = state.p_hat(h, s, a);
        bonuses[static_cast<std::size_t>(s * A + a)] = state.bonus(h, s, a);
      }
    for (int s = 0; s < S; ++s)
      for (std::size_t k = 0; k < NB; ++k) {
        for (int a = 0; a < A; ++a) {
          const auto i = static_cast<std::size_t>(s * A + a);
          q[static_cast<std::size_t>(a)] =
              detail::expected_next(mdp, lattice, h, s, a, p_rows[i], plan.values, k) + bonuses[i];
        }
        const auto best = argmax_lowest(q);
        plan.policy.set_action(h, s, k, static_cast<int>(best));
        plan.values.at(h, s, k) = std::min(q[best], clip);
      }
  }
  return plan;
}

std::size_t select_budget_optimistic(std::span<const double> v1, const BudgetLattice& lattice) {
  const auto indices = lattice.initial_indices();
  return argmax_budget(v1, lattice, indices).index;
}

OptimistRun run_meta_optimistic(const TabularMDP& mdp, const BudgetLattice& lattice,
                                const UtilitySpec& u, const OptimistOptions& options) {
  if (options.rounds < 1) throw ArgumentError("K must be at least 1");
  const auto optimum = solve_optimal_oce(mdp, lattice, u, options.refine_tol);
  OptimistRun run{{}, optimum.value, UcbviState(mdp, options.rounds, options.ucbvi),
                  AugPolicy(mdp.horizon(), mdp.n_states(), lattice.size(), mdp.n_actions(),
                            AugPolicy::Kind::Deterministic),
                  0};
  run.logs.reserve(static_cast<std::size_t>(options.rounds));
  const SeedStream seeds(options.seed);
  const int s1 = mdp.init_state();
  double cum = 0.0;
  for (int k = 1; k <= options.rounds; ++k) {
    auto plan = ucbvi_plan(run.state, mdp, lattice, u);
    const auto b = select_budget_optimistic(plan.values.row(0, s1), lattice);
    const auto law = exact_return_distribution(mdp, lattice, plan.policy, b);
    const double oce = oce_dual(u, law, options.refine_tol).value;
    auto rng = seeds.engine(static_cast<std::uint64_t>(k), SeedStream::Purpose::Rollout);
    const auto traj = sample_trajectory(mdp, lattice, plan.policy, b, rng);
    run.state.record(traj);
    const double regret = optimum.value - oce;
    cum += regret;
    run.logs.push_back({k, lattice.value(b), b, plan.values.at(0, s1, b), oce,
                        reporting_value(u, law, options.refine_tol), regret, cum,
                        mdp.reward_value(traj.return_ticks)});
    if (k == options.rounds) {
      run.final_policy = std::move(plan.policy);
      run.final_budget = b;
    }
  }
  return run;
}

double greedy_learned_oce(const UcbviState& state, const TabularMDP& mdp,
                          const BudgetLattice& lattice, const UtilitySpec& u) {
  UcbviState greedy = state;
  greedy.set_bonus_scale(0.0);
  const auto plan = ucbvi_plan(greedy, mdp, lattice, u);
  const auto b = select_budget_optimistic(plan.values.row(0, mdp.init_state()), lattice);
  return oce_of_policy(mdp, lattice, u, plan.policy, b);
}

}  // namespace ocerl
