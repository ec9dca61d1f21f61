#pragma once

// Plain-text MDP description.
//
//   # comment
//   n_states 2
//   n_actions 2
//   horizon 2
//   quantum 0.5
//   init_state 0
//   transitions
//   0 0 0 : 0 1           <- h s a : P(s'=0) P(s'=1) ...
//   ...
//   rewards
//   0 0 0 : 0 0.5 1 0.5   <- h s a : (value prob)+
//   ...
//
// Indices are 0-based. Every (h, s, a) needs exactly one row in each section.
// Header keys may come in any order but all precede `transitions`.

#include "ocerl/mdp.hpp"

#include <filesystem>
#include <istream>
#include <string>

namespace ocerl {

/// Throws ParseError carrying the offending line number.
TabularMDP parse_mdp_spec(std::istream& in);
TabularMDP parse_mdp_spec(const std::string& text);
TabularMDP read_mdp_spec(const std::filesystem::path& path);

/// Probabilities and rewards are printed with 17 significant digits, so
/// parsing the output reproduces an identical TabularMDP.
std::string write_mdp_spec(const TabularMDP& mdp);
void write_mdp_spec(const TabularMDP& mdp, const std::filesystem::path& path);

}  // namespace ocerl
