#pragma once

// Brute-force optimum over deterministic history-dependent policies.
//
// Deliberately independent of the augmented-MDP code: it walks the tree of
// history prefixes (s_1, a_1, r_1, s_2, ..., s_h) of the original MDP and
// enumerates one action per reachable prefix.

#include "ocerl/mdp.hpp"
#include "ocerl/risk.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace ocerl {

/// Decision table of a deterministic history-dependent policy. Keys are
/// history prefixes (s_1, a_1, r_1 ticks, s_2, ..., s_h).
struct HistoryPolicy {
  std::map<std::vector<std::int64_t>, int> decisions;

  /// -1 when the prefix is not in the table.
  int action(const std::vector<std::int64_t>& prefix) const;
};

struct OracleOptions {
  std::uint64_t policy_cap = 1'000'000;
  double refine_tol = kDefaultRefineTol;
};

struct OracleResult {
  double value;
  HistoryPolicy policy;
  DiscreteDist distribution;
  std::uint64_t policy_count;
  std::size_t distinct_distributions;
};

using ReturnObjective = std::function<double(const DiscreteDist&)>;

/// Number of deterministic history-dependent policies, counting only
/// decisions at prefixes the policy itself can reach. Saturates at UINT64_MAX.
std::uint64_t count_history_policies(const TabularMDP& mdp);

/// max over history-dependent deterministic policies of objective(Z(pi)).
/// Throws RefusalError naming the required cap when the count exceeds it.
/// Ties keep the policy enumerated first (lowest actions first).
OracleResult brute_force_oracle(const TabularMDP& mdp, const ReturnObjective& objective,
                                const OracleOptions& options = {});

/// Same with objective = OCE_u.
OracleResult brute_force_oracle(const TabularMDP& mdp, const UtilitySpec& u,
                                const OracleOptions& options = {});

}  // namespace ocerl
