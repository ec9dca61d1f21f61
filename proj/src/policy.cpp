#include "ocerl/policy.hpp"

#include "ocerl/errors.hpp"

namespace ocerl {

AugPolicy::AugPolicy(int horizon, int n_states, std::size_t n_budgets, int n_actions, Kind kind,
                     double offset)
    : horizon_(horizon),
      n_states_(n_states),
      n_budgets_(n_budgets),
      n_actions_(n_actions),
      kind_(kind),
      offset_(offset) {
  if (horizon <= 0 || n_states <= 0 || n_actions <= 0 || n_budgets == 0)
    throw ArgumentError("policy dimensions must be positive");
  probs_.assign(static_cast<std::size_t>(horizon) * n_states * n_budgets * n_actions, 0.0);
}

AugPolicy AugPolicy::markov(int horizon, int n_states, std::size_t n_budgets, int n_actions,
                            std::span<const int> actions) {
  if (actions.size() != static_cast<std::size_t>(horizon) * n_states)
    throw ArgumentError("markov policy needs one action per (step, state)");
  AugPolicy pi(horizon, n_states, n_budgets, n_actions, Kind::Deterministic);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < n_states; ++s)
      for (std::size_t k = 0; k < n_budgets; ++k)
        pi.set_action(h, s, k, actions[static_cast<std::size_t>(h) * n_states + s]);
  return pi;
}

AugPolicy AugPolicy::uniform(int horizon, int n_states, std::size_t n_budgets, int n_actions) {
  AugPolicy pi(horizon, n_states, n_budgets, n_actions, Kind::Softmax);
  for (auto& p : pi.probs_) p = 1.0 / n_actions;
  return pi;
}

std::size_t AugPolicy::slot(int h, int s, std::size_t k) const {
  return ((static_cast<std::size_t>(h) * n_states_ + s) * n_budgets_ + k) * n_actions_;
}

std::span<const double> AugPolicy::probs(int h, int s, std::size_t k) const {
  return {probs_.data() + slot(h, s, k), static_cast<std::size_t>(n_actions_)};
}

std::span<double> AugPolicy::probs(int h, int s, std::size_t k) {
  return {probs_.data() + slot(h, s, k), static_cast<std::size_t>(n_actions_)};
}

void AugPolicy::set_action(int h, int s, std::size_t k, int a) {
  if (a < 0 || a >= n_actions_) throw ArgumentError("action index out of range");
  auto row = probs(h, s, k);
  for (auto& p : row) p = 0.0;
  row[static_cast<std::size_t>(a)] = 1.0;
}

bool AugPolicy::defined(int h, int s, std::size_t k) const {
  for (double p : probs(h, s, k))
    if (p > 0.0) return true;
  return false;
}

int AugPolicy::greedy_action(int h, int s, std::size_t k) const {
  const auto row = probs(h, s, k);
  int best = -1;
  double best_p = 0.0;
  for (int a = 0; a < n_actions_; ++a)
    if (row[static_cast<std::size_t>(a)] > best_p) {
      best_p = row[static_cast<std::size_t>(a)];
      best = a;
    }
  return best;
}

}  // namespace ocerl
