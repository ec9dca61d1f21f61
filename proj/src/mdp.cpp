#include "ocerl/mdp.hpp"

#include "ocerl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace ocerl {

namespace {

constexpr double kRowSlack = 1e-12;

std::string where(int h, int s, int a) {
  return "(h=" + std::to_string(h) + ", s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

TabularMDP::TabularMDP(int n_states, int n_actions, int horizon, double quantum, int init_state,
                       std::vector<double> transitions,
                       std::vector<std::vector<RewardAtom>> rewards)
    : n_states_(n_states),
      n_actions_(n_actions),
      horizon_(horizon),
      quantum_(quantum),
      init_state_(init_state),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  if (n_states <= 0 || n_actions <= 0 || horizon <= 0)
    throw ConstructionError("MDP needs positive state, action and horizon counts");
  if (!(quantum > 0.0) || !std::isfinite(quantum))
    throw ConstructionError("reward quantum must be positive");
  if (init_state < 0 || init_state >= n_states)
    throw ConstructionError("initial state out of range");
  const std::size_t n_sa = static_cast<std::size_t>(horizon) * n_states * n_actions;
  if (transitions_.size() != n_sa * n_states)
    throw ConstructionError("transition table has the wrong size");
  if (rewards_.size() != n_sa) throw ConstructionError("reward table has the wrong size");

  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < n_states; ++s)
      for (int a = 0; a < n_actions; ++a) {
        double total = 0.0;
        for (double p : transition_row(h, s, a)) {
          if (!(p >= 0.0)) throw ConstructionError("negative transition probability at " + where(h, s, a));
          total += p;
        }
        if (std::abs(total - 1.0) > kRowSlack)
          throw ConstructionError("transition row does not sum to 1 at " + where(h, s, a));

        auto& rw = rewards_[sa(h, s, a)];
        if (rw.empty()) throw ConstructionError("empty reward distribution at " + where(h, s, a));
        std::map<std::int64_t, double> merged;
        double rtotal = 0.0;
        for (const auto& r : rw) {
          if (r.ticks < 0) throw ConstructionError("negative reward at " + where(h, s, a));
          if (!(r.prob >= 0.0)) throw ConstructionError("negative reward probability at " + where(h, s, a));
          rtotal += r.prob;
          if (r.prob > 0.0) merged[r.ticks] += r.prob;
        }
        if (std::abs(rtotal - 1.0) > kRowSlack)
          throw ConstructionError("reward distribution does not sum to 1 at " + where(h, s, a));
        rw.clear();
        for (const auto& [t, p] : merged) rw.push_back({t, p});
      }
}

std::span<const double> TabularMDP::transition_row(int h, int s, int a) const {
  return {transitions_.data() + sa(h, s, a) * n_states_, static_cast<std::size_t>(n_states_)};
}

const std::vector<RewardAtom>& TabularMDP::reward(int h, int s, int a) const {
  return rewards_[sa(h, s, a)];
}

std::int64_t TabularMDP::max_reward_ticks(int h) const {
  std::int64_t m = 0;
  for (int s = 0; s < n_states_; ++s)
    for (int a = 0; a < n_actions_; ++a) m = std::max(m, reward(h, s, a).back().ticks);
  return m;
}

// ---------------------------------------------------------------------------

MdpBuilder::MdpBuilder(int n_states, int n_actions, int horizon, double quantum, int init_state)
    : n_states_(n_states),
      n_actions_(n_actions),
      horizon_(horizon),
      quantum_(quantum),
      init_state_(init_state) {
  if (n_states <= 0 || n_actions <= 0 || horizon <= 0)
    throw ConstructionError("MDP needs positive state, action and horizon counts");
  const std::size_t n_sa = static_cast<std::size_t>(horizon) * n_states * n_actions;
  transitions_.resize(n_sa);
  rewards_.resize(n_sa);
}

std::size_t MdpBuilder::sa(int h, int s, int a) const {
  if (h < 0 || h >= horizon_ || s < 0 || s >= n_states_ || a < 0 || a >= n_actions_)
    throw ArgumentError("index out of range " + where(h, s, a));
  return (static_cast<std::size_t>(h) * n_states_ + s) * n_actions_ + a;
}

MdpBuilder& MdpBuilder::transition(int h, int s, int a, std::vector<double> row) {
  if (row.size() != static_cast<std::size_t>(n_states_))
    throw ArgumentError("transition row needs one entry per state");
  transitions_[sa(h, s, a)] = std::move(row);
  return *this;
}

MdpBuilder& MdpBuilder::transition_to(int h, int s, int a, int next) {
  if (next < 0 || next >= n_states_) throw ArgumentError("next state out of range");
  std::vector<double> row(static_cast<std::size_t>(n_states_), 0.0);
  row[static_cast<std::size_t>(next)] = 1.0;
  return transition(h, s, a, std::move(row));
}

MdpBuilder& MdpBuilder::reward(int h, int s, int a,
                               std::vector<std::pair<double, double>> value_probs) {
  rewards_[sa(h, s, a)] = std::move(value_probs);
  return *this;
}

TabularMDP MdpBuilder::build() const {
  if (!(quantum_ > 0.0)) throw ConstructionError("reward quantum must be positive");
  std::vector<double> flat;
  flat.reserve(transitions_.size() * n_states_);
  std::vector<std::vector<RewardAtom>> rewards(rewards_.size());
  for (int h = 0; h < horizon_; ++h)
    for (int s = 0; s < n_states_; ++s)
      for (int a = 0; a < n_actions_; ++a) {
        const auto i = sa(h, s, a);
        if (transitions_[i].empty())
          throw ConstructionError("missing transition row at " + where(h, s, a));
        flat.insert(flat.end(), transitions_[i].begin(), transitions_[i].end());
        for (const auto& [v, p] : rewards_[i]) {
          const double scaled = v / quantum_;
          const double ticks = std::round(scaled);
          if (std::abs(scaled - ticks) > 1e-9 * std::max(1.0, std::abs(scaled)))
            throw ConstructionError("reward " + std::to_string(v) + " at " + where(h, s, a) +
                                    " is not a multiple of the quantum");
          rewards[i].push_back({static_cast<std::int64_t>(ticks), p});
        }
      }
  return TabularMDP(n_states_, n_actions_, horizon_, quantum_, init_state_, std::move(flat),
                    std::move(rewards));
}

// ---------------------------------------------------------------------------

BudgetLattice::BudgetLattice(double reward_quantum, int refine, std::int64_t lo_ticks,
                             std::int64_t hi_ticks, std::vector<std::int64_t> support_reward_ticks)
    : reward_quantum_(reward_quantum),
      refine_(refine),
      lo_(lo_ticks),
      hi_(hi_ticks),
      support_(std::move(support_reward_ticks)) {
  if (!(reward_quantum > 0.0)) throw ConstructionError("lattice quantum must be positive");
  if (refine < 1) throw ConstructionError("lattice refinement must be >= 1");
  if (lo_ > hi_) throw ConstructionError("empty budget lattice");
  if (support_.empty()) throw ConstructionError("return support must be non-empty");
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
  if (step(support_.front()) < lo_ || step(support_.back()) > hi_)
    throw ConstructionError("return support must lie on the lattice");
}

std::size_t BudgetLattice::index_of_ticks(std::int64_t budget_ticks) const {
  if (budget_ticks < lo_ || budget_ticks > hi_) throw ArgumentError("budget outside the lattice");
  return static_cast<std::size_t>(budget_ticks - lo_);
}

std::size_t BudgetLattice::index_of(double budget) const {
  const double scaled = budget / quantum();
  const double ticks = std::round(scaled);
  if (std::abs(scaled - ticks) > 1e-9 * std::max(1.0, std::abs(scaled)))
    throw ArgumentError("budget " + std::to_string(budget) + " is not on the lattice");
  return index_of_ticks(static_cast<std::int64_t>(ticks));
}

std::vector<double> BudgetLattice::support_values() const {
  std::vector<double> out;
  for (auto t : support_) out.push_back(static_cast<double>(t) * reward_quantum_);
  return out;
}

std::vector<std::size_t> BudgetLattice::initial_indices() const {
  std::vector<std::size_t> out;
  for (std::int64_t t = step(support_.front()); t <= step(support_.back()); ++t)
    out.push_back(index_of_ticks(t));
  return out;
}

std::vector<std::size_t> BudgetLattice::candidate_indices() const {
  if (refine_ > 1) return initial_indices();
  std::vector<std::size_t> out;
  for (auto t : support_) out.push_back(index_of_ticks(step(t)));
  return out;
}

BudgetLattice build_lattice(const TabularMDP& mdp, int refine) {
  std::set<std::pair<int, std::int64_t>> frontier{{mdp.init_state(), 0}};
  std::int64_t reward_span = 0;
  for (int h = 0; h < mdp.horizon(); ++h) {
    std::set<std::pair<int, std::int64_t>> next;
    for (const auto& [s, total] : frontier)
      for (int a = 0; a < mdp.n_actions(); ++a) {
        const auto row = mdp.transition_row(h, s, a);
        for (const auto& r : mdp.reward(h, s, a))
          for (int s2 = 0; s2 < mdp.n_states(); ++s2)
            if (row[static_cast<std::size_t>(s2)] > 0.0) next.insert({s2, total + r.ticks});
      }
    frontier = std::move(next);
    reward_span += mdp.max_reward_ticks(h);
  }
  std::vector<std::int64_t> support;
  for (const auto& [s, total] : frontier) support.push_back(total);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const std::int64_t lo = (support.front() - reward_span) * refine;
  const std::int64_t hi = support.back() * refine;
  return BudgetLattice(mdp.quantum(), refine, lo, hi, std::move(support));
}

// ---------------------------------------------------------------------------

std::uint64_t SeedStream::key(std::uint64_t round, Purpose purpose) const {
  return splitmix64(splitmix64(splitmix64(seed_) ^ round) ^
                    static_cast<std::uint64_t>(purpose) * 0xD1B54A32D192ED03ULL);
}

std::mt19937_64 SeedStream::engine(std::uint64_t round, Purpose purpose) const {
  return std::mt19937_64(key(round, purpose));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_index(std::span<const double> probs, std::mt19937_64& rng) {
  const double x = uniform01(rng);
  double acc = 0.0;
  std::size_t last = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = i;
    if (x < acc) return i;
  }
  if (last == probs.size()) throw ContractViolation("cannot sample from an all-zero distribution");
  return last;
}

Trajectory sample_trajectory(const TabularMDP& mdp, const BudgetLattice& lattice,
                             const AugPolicy& policy, std::size_t b1_index, std::mt19937_64& rng) {
  if (b1_index >= lattice.size()) throw ArgumentError("initial budget index outside the lattice");
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(mdp.horizon()));
  int s = mdp.init_state();
  auto k = static_cast<std::int64_t>(b1_index);
  std::vector<double> rprobs;
  for (int h = 0; h < mdp.horizon(); ++h) {
    const auto uk = static_cast<std::size_t>(k);
    if (!policy.defined(h, s, uk))
      throw ContractViolation("policy undefined at reached state (h=" + std::to_string(h) +
                              ", s=" + std::to_string(s) + ", b=" +
                              std::to_string(lattice.value(uk)) + ")");
    const int a = static_cast<int>(sample_index(policy.probs(h, s, uk), rng));
    const auto& rw = mdp.reward(h, s, a);
    rprobs.clear();
    for (const auto& r : rw) rprobs.push_back(r.prob);
    const auto r = rw[sample_index(rprobs, rng)].ticks;
    const int next = static_cast<int>(sample_index(mdp.transition_row(h, s, a), rng));
    traj.steps.push_back({s, uk, a, r, next});
    traj.return_ticks += r;
    k -= lattice.step(r);
    if (k < 0) throw ContractViolation("budget left the lattice; initial budget below min B");
    s = next;
  }
  return traj;
}

}  // namespace ocerl
