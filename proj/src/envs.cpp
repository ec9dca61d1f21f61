#include "ocerl/envs.hpp"

#include "ocerl/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ocerl {

TabularMDP build_synthetic_mdp() {
  constexpr int s1 = 0;
  constexpr int s2 = 1;
  MdpBuilder b(2, 2, 2, 0.5, s1);
  for (int h = 0; h < 2; ++h)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        b.transition_to(h, s, a, s2);
        b.reward(h, s, a, {{0.0, 1.0}});
      }
  for (int a = 0; a < 2; ++a) b.reward(0, s1, a, {{0.0, 0.5}, {1.0, 0.5}});
  b.reward(1, s2, 0, {{0.0, 0.25}, {1.5, 0.75}});
  b.reward(1, s2, 1, {{0.5, 1.0}});
  return b.build();
}

namespace {

// Splits 8 eighths into `parts` positive pieces.
std::vector<double> dyadic_weights(int parts, std::mt19937_64& rng) {
  constexpr int kUnits = 8;
  std::vector<int> cuts(static_cast<std::size_t>(kUnits - 1));
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(static_cast<std::size_t>(parts - 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> w;
  int prev = 0;
  for (int c : cuts) {
    w.push_back((c - prev) / static_cast<double>(kUnits));
    prev = c;
  }
  w.push_back((kUnits - prev) / static_cast<double>(kUnits));
  return w;
}

int uniform_int(int lo, int hi, std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

TabularMDP random_mdp(std::uint64_t seed, const RandomMdpOptions& o) {
  if (o.max_reward_ticks < 0 || o.max_reward_atoms < 1 || o.max_successors < 1 ||
      o.max_reward_atoms > 8 || o.max_successors > 8)
    throw ArgumentError("invalid random MDP options");
  auto rng = SeedStream(seed).engine(0, SeedStream::Purpose::Generator);
  MdpBuilder b(o.n_states, o.n_actions, o.horizon, o.quantum, 0);
  std::vector<int> states(static_cast<std::size_t>(o.n_states));
  std::iota(states.begin(), states.end(), 0);
  std::vector<int> ticks(static_cast<std::size_t>(o.max_reward_ticks + 1));
  std::iota(ticks.begin(), ticks.end(), 0);
  for (int h = 0; h < o.horizon; ++h)
    for (int s = 0; s < o.n_states; ++s)
      for (int a = 0; a < o.n_actions; ++a) {
        const int n_next = uniform_int(1, std::min(o.max_successors, o.n_states), rng);
        std::shuffle(states.begin(), states.end(), rng);
        const auto tw = dyadic_weights(n_next, rng);
        std::vector<double> row(static_cast<std::size_t>(o.n_states), 0.0);
        for (int i = 0; i < n_next; ++i) row[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])] = tw[static_cast<std::size_t>(i)];
        b.transition(h, s, a, std::move(row));

        const int n_atoms = uniform_int(1, std::min(o.max_reward_atoms, o.max_reward_ticks + 1), rng);
        std::shuffle(ticks.begin(), ticks.end(), rng);
        const auto rw = dyadic_weights(n_atoms, rng);
        std::vector<std::pair<double, double>> atoms;
        for (int i = 0; i < n_atoms; ++i)
          atoms.emplace_back(ticks[static_cast<std::size_t>(i)] * o.quantum, rw[static_cast<std::size_t>(i)]);
        b.reward(h, s, a, std::move(atoms));
      }
  return b.build();
}

TabularMDP constant_mdp(int horizon, double value, double quantum) {
  MdpBuilder b(1, 1, horizon, quantum, 0);
  for (int h = 0; h < horizon; ++h) {
    b.transition_to(h, 0, 0, 0);
    b.reward(h, 0, 0, {{value, 1.0}});
  }
  return b.build();
}

}  // namespace ocerl
