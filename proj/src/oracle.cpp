#include "ocerl/oracle.hpp"

#include "ocerl/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ocerl {

int HistoryPolicy::action(const std::vector<std::int64_t>& prefix) const {
  const auto it = decisions.find(prefix);
  return it == decisions.end() ? -1 : it->second;
}

namespace {

using Law = std::vector<std::pair<long long, double>>;  // (return ticks, prob), ascending

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return b > kSaturated - a ? kSaturated : a + b;
}

struct Outcome {
  std::int64_t reward_ticks;
  int next_state;
  double weight;
};

std::vector<Outcome> outcomes(const TabularMDP& mdp, int h, int s, int a) {
  std::vector<Outcome> out;
  const auto row = mdp.transition_row(h, s, a);
  for (const auto& r : mdp.reward(h, s, a))
    for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
      const double p = row[static_cast<std::size_t>(s2)];
      if (p > 0.0) out.push_back({r.ticks, s2, r.prob * p});
    }
  return out;
}

std::uint64_t count_from(const TabularMDP& mdp, int h, int s) {
  if (h == mdp.horizon()) return 1;
  std::uint64_t total = 0;
  for (int a = 0; a < mdp.n_actions(); ++a) {
    std::uint64_t prod = 1;
    for (const auto& o : outcomes(mdp, h, s, a)) prod = sat_mul(prod, count_from(mdp, h + 1, o.next_state));
    total = sat_add(total, prod);
  }
  return total;
}

struct Candidate {
  Law law;
  int action;
  std::vector<std::uint32_t> child_choice;
};

struct Child {
  std::size_t node;
  std::int64_t reward_ticks;
  double weight;
};

struct Node {
  std::vector<std::int64_t> prefix;
  std::vector<std::vector<Child>> children;  // per action
  std::vector<Candidate> candidates;
};

class Enumerator {
 public:
  explicit Enumerator(const TabularMDP& mdp) : mdp_(mdp) {}

  std::size_t build(int h, int s, std::vector<std::int64_t> prefix) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({std::move(prefix), {}, {}});
    if (h == mdp_.horizon()) {
      nodes_[id].candidates.push_back({{{0, 1.0}}, -1, {}});
      return id;
    }
    nodes_[id].children.resize(static_cast<std::size_t>(mdp_.n_actions()));
    for (int a = 0; a < mdp_.n_actions(); ++a)
      for (const auto& o : outcomes(mdp_, h, s, a)) {
        auto child_prefix = nodes_[id].prefix;
        child_prefix.push_back(a);
        child_prefix.push_back(o.reward_ticks);
        child_prefix.push_back(o.next_state);
        const auto child = build(h + 1, o.next_state, std::move(child_prefix));
        nodes_[id].children[static_cast<std::size_t>(a)].push_back({child, o.reward_ticks, o.weight});
      }
    combine(id);
    return id;
  }

  const Node& node(std::size_t id) const { return nodes_[id]; }

  void reconstruct(std::size_t id, std::size_t cand, HistoryPolicy& out) const {
    const auto& c = nodes_[id].candidates[cand];
    if (c.action < 0) return;
    out.decisions[nodes_[id].prefix] = c.action;
    const auto& kids = nodes_[id].children[static_cast<std::size_t>(c.action)];
    for (std::size_t j = 0; j < kids.size(); ++j) reconstruct(kids[j].node, c.child_choice[j], out);
  }

 private:
  void combine(std::size_t id) {
    std::map<Law, bool> seen;
    std::vector<Candidate> result;
    for (int a = 0; a < mdp_.n_actions(); ++a) {
      const auto& kids = nodes_[id].children[static_cast<std::size_t>(a)];
      std::vector<std::uint32_t> choice(kids.size(), 0);
      while (true) {
        std::map<long long, double> mixed;
        for (std::size_t j = 0; j < kids.size(); ++j) {
          const auto& law = nodes_[kids[j].node].candidates[choice[j]].law;
          for (const auto& [t, p] : law) mixed[t + kids[j].reward_ticks] += kids[j].weight * p;
        }
        Law law(mixed.begin(), mixed.end());
        if (seen.emplace(law, true).second) result.push_back({std::move(law), a, choice});
        if (!advance(choice, kids)) break;
      }
    }
    nodes_[id].candidates = std::move(result);
  }

  // Odometer over child candidates, last child fastest.
  bool advance(std::vector<std::uint32_t>& choice, const std::vector<Child>& kids) const {
    for (std::size_t j = kids.size(); j-- > 0;) {
      if (++choice[j] < nodes_[kids[j].node].candidates.size()) return true;
      choice[j] = 0;
    }
    return false;
  }

  const TabularMDP& mdp_;
  std::vector<Node> nodes_;
};

}  // namespace

std::uint64_t count_history_policies(const TabularMDP& mdp) {
  return count_from(mdp, 0, mdp.init_state());
}

OracleResult brute_force_oracle(const TabularMDP& mdp, const ReturnObjective& objective,
                                const OracleOptions& options) {
  const auto count = count_history_policies(mdp);
  if (count > options.policy_cap)
    throw RefusalError("brute-force oracle needs a policy cap of at least " + std::to_string(count) +
                           " (current cap " + std::to_string(options.policy_cap) + ")",
                       count);
  Enumerator en(mdp);
  const auto root = en.build(0, mdp.init_state(), {mdp.init_state()});
  const auto& cands = en.node(root).candidates;
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double v = objective(DiscreteDist::from_lattice(cands[i].law, mdp.quantum()));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  HistoryPolicy policy;
  en.reconstruct(root, best, policy);
  return {best_value, std::move(policy), DiscreteDist::from_lattice(cands[best].law, mdp.quantum()),
          count, cands.size()};
}

OracleResult brute_force_oracle(const TabularMDP& mdp, const UtilitySpec& u,
                                const OracleOptions& options) {
  const double tol = options.refine_tol;
  return brute_force_oracle(
      mdp, [&u, tol](const DiscreteDist& d) { return oce_dual(u, d, tol).value; }, options);
}

}  // namespace ocerl
