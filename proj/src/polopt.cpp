#include "ocerl/polopt.hpp"

#include "ocerl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ocerl {

SoftmaxPolicyParams::SoftmaxPolicyParams(int horizon, int n_states, std::size_t n_budgets,
                                         int n_actions, double eta)
    : horizon_(horizon), n_states_(n_states), n_budgets_(n_budgets), n_actions_(n_actions), eta_(eta) {
  if (horizon < 1 || n_states < 1 || n_budgets < 1 || n_actions < 1)
    throw ArgumentError("softmax policy needs positive dimensions");
  if (!std::isfinite(eta) || eta < 0.0) throw ArgumentError("learning rate must be finite and >= 0");
  theta_.assign(static_cast<std::size_t>(horizon) * n_states * n_budgets * n_actions, 0.0);
}

void SoftmaxPolicyParams::apply(const QTable& q) {
  if (q.n_actions() != n_actions_) throw ArgumentError("Q table shape does not match the policy");
  for (int h = 0; h < horizon_; ++h)
    for (int s = 0; s < n_states_; ++s)
      for (std::size_t k = 0; k < n_budgets_; ++k) {
        const auto qrow = q.row(h, s, k);
        double* th = theta_.data() + slot(h, s, k);
        double top = -INFINITY;
        for (int a = 0; a < n_actions_; ++a) {
          th[a] += eta_ * qrow[static_cast<std::size_t>(a)];
          top = std::max(top, th[a]);
        }
        for (int a = 0; a < n_actions_; ++a) th[a] -= top;
      }
  ++round_;
}

AugPolicy SoftmaxPolicyParams::policy() const {
  AugPolicy pi(horizon_, n_states_, n_budgets_, n_actions_, AugPolicy::Kind::Softmax);
  for (int h = 0; h < horizon_; ++h)
    for (int s = 0; s < n_states_; ++s)
      for (std::size_t k = 0; k < n_budgets_; ++k) {
        const auto th = logits(h, s, k);
        const double top = *std::max_element(th.begin(), th.end());
        auto p = pi.probs(h, s, k);
        double z = 0.0;
        for (std::size_t a = 0; a < th.size(); ++a) z += p[a] = std::exp(th[a] - top);
        for (auto& x : p) x /= z;
      }
  return pi;
}

double default_eta(const TabularMDP& mdp) {
  return mdp.horizon() * std::log(static_cast<double>(mdp.n_actions()));
}

SoftmaxPolicyParams npg_step(const SoftmaxPolicyParams& params, const TabularMDP& mdp,
                             const BudgetLattice& lattice, const UtilitySpec& u) {
  const auto eval = dp_evaluate(mdp, lattice, u, params.policy());
  SoftmaxPolicyParams next = params;
  next.apply(eval.q);
  return next;
}

QTable sampled_q(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                 const AugPolicy& policy, int n_rollouts, std::mt19937_64& rng) {
  if (n_rollouts < 1) throw ArgumentError("sampled Q needs at least one rollout");
  const int H = mdp.horizon();
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const std::size_t NB = lattice.size();
  QTable q(H, S, NB, A);
  std::vector<double> rprobs;
  auto step = [&](int h, int s, std::int64_t& k, int a) {
    const auto& rw = mdp.reward(h, s, a);
    rprobs.clear();
    for (const auto& r : rw) rprobs.push_back(r.prob);
    const auto r = rw[sample_index(rprobs, rng)].ticks;
    k = std::max<std::int64_t>(k - lattice.step(r), 0);
    return static_cast<int>(sample_index(mdp.transition_row(h, s, a), rng));
  };
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (std::size_t k0 = 0; k0 < NB; ++k0)
        for (int a0 = 0; a0 < A; ++a0) {
          double acc = 0.0;
          for (int i = 0; i < n_rollouts; ++i) {
            auto k = static_cast<std::int64_t>(k0);
            int st = step(h, s, k, a0);
            for (int t = h + 1; t < H; ++t) {
              const int a = static_cast<int>(sample_index(policy.probs(t, st, static_cast<std::size_t>(k)), rng));
              st = step(t, st, k, a);
            }
            acc += u(-(lattice.value(static_cast<std::size_t>(k)) + policy.offset()));
          }
          q.row(h, s, k0)[static_cast<std::size_t>(a0)] = acc / n_rollouts;
        }
  return q;
}

std::size_t select_budget_po(std::span<const double> v1, const BudgetLattice& lattice) {
  const auto indices = lattice.candidate_indices();
  return argmax_budget(v1, lattice, indices).index;
}

double compute_rlb(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                   const AugPolicy& policy) {
  const auto eval = dp_evaluate(mdp, lattice, u, policy);
  const auto indices = lattice.candidate_indices();
  return argmax_budget(eval.values.row(0, mdp.init_state()), lattice, indices, policy.offset())
      .objective;
}

namespace {

struct Snapshot {
  AugPolicy policy;
  AugEvaluation eval;
  BudgetChoice choice;
  double mixed;
};

Snapshot snapshot(const SoftmaxPolicyParams& params, const TabularMDP& mdp,
                  const BudgetLattice& lattice, const UtilitySpec& u) {
  auto policy = params.policy();
  auto eval = dp_evaluate(mdp, lattice, u, policy);
  const auto indices = lattice.candidate_indices();
  const auto v1 = eval.values.row(0, mdp.init_state());
  const auto choice = argmax_budget(v1, lattice, indices);
  double mixed = 0.0;
  for (auto k : indices) mixed += v1[k];
  mixed /= static_cast<double>(indices.size());
  return {std::move(policy), std::move(eval), choice, mixed};
}

}  // namespace

PoRun run_meta_po(const TabularMDP& mdp, const BudgetLattice& lattice, const UtilitySpec& u,
                  const PoOptions& options) {
  if (options.rounds < 1) throw ArgumentError("K must be at least 1");
  if (options.sampled_rollouts < 0) throw ArgumentError("rollout count must be non-negative");
  const double eta = options.eta > 0.0 ? options.eta : default_eta(mdp);
  const auto optimum = solve_optimal_oce(mdp, lattice, u, options.refine_tol);
  PoRun run{{}, optimum.value,
            SoftmaxPolicyParams(mdp.horizon(), mdp.n_states(), lattice.size(), mdp.n_actions(), eta)};
  run.logs.reserve(static_cast<std::size_t>(options.rounds));
  const SeedStream seeds(options.seed);
  auto cur = snapshot(run.final_params, mdp, lattice, u);
  for (int k = 1; k <= options.rounds; ++k) {
    const auto b = cur.choice.index;
    const auto law = exact_return_distribution(mdp, lattice, cur.policy, b);
    const double oce = oce_dual(u, law, options.refine_tol).value;
    const double report = reporting_value(u, law, options.refine_tol);
    if (options.sampled_rollouts > 0) {
      auto rng = seeds.engine(static_cast<std::uint64_t>(k), SeedStream::Purpose::SampledQ);
      run.final_params.apply(sampled_q(mdp, lattice, u, cur.policy, options.sampled_rollouts, rng));
    } else {
      run.final_params.apply(cur.eval.q);
    }
    auto next = snapshot(run.final_params, mdp, lattice, u);
    run.logs.push_back({k, cur.choice.objective, lattice.value(b), b, oce, report,
                        next.choice.objective - cur.choice.objective, cur.mixed});
    cur = std::move(next);
  }
  return run;
}

}  // namespace ocerl
