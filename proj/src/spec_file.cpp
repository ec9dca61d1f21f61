#include "ocerl/spec_file.hpp"

#include "ocerl/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace ocerl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError("expected a number, got '" + tok + "'", line);
  return v;
}

int to_int(const std::string& tok, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 0 || v > 1'000'000)
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  return static_cast<int>(v);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

enum class Section { Header, Transitions, Rewards };

struct Header {
  std::optional<int> n_states, n_actions, horizon, init_state;
  std::optional<double> quantum;
};

}  // namespace

TabularMDP parse_mdp_spec(std::istream& in) {
  Header hd;
  Section section = Section::Header;
  std::optional<MdpBuilder> builder;
  std::map<std::tuple<int, int, int>, int> seen_t, seen_r;
  int line_no = 0;

  auto start_body = [&](int line) {
    if (!hd.n_states || !hd.n_actions || !hd.horizon || !hd.quantum || !hd.init_state)
      throw ParseError("header must define n_states, n_actions, horizon, quantum and init_state", line);
    if (*hd.n_states < 1 || *hd.n_actions < 1 || *hd.horizon < 1)
      throw ParseError("n_states, n_actions and horizon must be positive", line);
    if (!(*hd.quantum > 0.0)) throw ParseError("quantum must be positive", line);
    if (*hd.init_state >= *hd.n_states) throw ParseError("init_state out of range", line);
    builder.emplace(*hd.n_states, *hd.n_actions, *hd.horizon, *hd.quantum, *hd.init_state);
  };

  auto parse_key = [&](const std::string& lhs, int line) {
    const auto t = split_ws(lhs);
    if (t.size() != 3) throw ParseError("row must start with 'h s a :'", line);
    const int h = to_int(t[0], line), s = to_int(t[1], line), a = to_int(t[2], line);
    if (h >= *hd.horizon || s >= *hd.n_states || a >= *hd.n_actions)
      throw ParseError("index (" + t[0] + ", " + t[1] + ", " + t[2] + ") out of range", line);
    return std::tuple{h, s, a};
  };

  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line == "transitions") {
      if (section != Section::Header) throw ParseError("unexpected 'transitions'", line_no);
      start_body(line_no);
      section = Section::Transitions;
      continue;
    }
    if (line == "rewards") {
      if (section != Section::Transitions) throw ParseError("'rewards' must follow 'transitions'", line_no);
      section = Section::Rewards;
      continue;
    }

    if (section == Section::Header) {
      const auto t = split_ws(line);
      if (t.size() != 2) throw ParseError("expected 'key value'", line_no);
      if (t[0] == "n_states") hd.n_states = to_int(t[1], line_no);
      else if (t[0] == "n_actions") hd.n_actions = to_int(t[1], line_no);
      else if (t[0] == "horizon") hd.horizon = to_int(t[1], line_no);
      else if (t[0] == "init_state") hd.init_state = to_int(t[1], line_no);
      else if (t[0] == "quantum") hd.quantum = to_double(t[1], line_no);
      else throw ParseError("unknown header key '" + t[0] + "'", line_no);
      continue;
    }

    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("missing ':'", line_no);
    const auto key = parse_key(line.substr(0, colon), line_no);
    const auto [h, s, a] = key;
    const auto vals = split_ws(line.substr(colon + 1));

    if (section == Section::Transitions) {
      if (!seen_t.emplace(key, line_no).second) throw ParseError("duplicate transition row", line_no);
      if (vals.size() != static_cast<std::size_t>(*hd.n_states))
        throw ParseError("transition row needs " + std::to_string(*hd.n_states) + " probabilities", line_no);
      std::vector<double> row;
      double sum = 0.0;
      for (const auto& v : vals) {
        const double p = to_double(v, line_no);
        if (p < 0.0) throw ParseError("negative probability", line_no);
        row.push_back(p);
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ParseError("transition row sums to " + fmt17(sum), line_no);
      builder->transition(h, s, a, std::move(row));
    } else {
      if (!seen_r.emplace(key, line_no).second) throw ParseError("duplicate reward row", line_no);
      if (vals.empty() || vals.size() % 2 != 0) throw ParseError("reward row needs (value prob) pairs", line_no);
      std::vector<std::pair<double, double>> atoms;
      double sum = 0.0;
      for (std::size_t i = 0; i < vals.size(); i += 2) {
        const double v = to_double(vals[i], line_no);
        const double p = to_double(vals[i + 1], line_no);
        if (v < 0.0) throw ParseError("negative reward", line_no);
        if (p < 0.0) throw ParseError("negative probability", line_no);
        const double scaled = v / *hd.quantum;
        if (std::abs(scaled - std::round(scaled)) > 1e-9 * std::max(1.0, std::abs(scaled)))
          throw ParseError("reward " + vals[i] + " is not a multiple of the quantum", line_no);
        atoms.emplace_back(v, p);
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ParseError("reward probabilities sum to " + fmt17(sum), line_no);
      builder->reward(h, s, a, std::move(atoms));
    }
  }

  if (section != Section::Rewards) throw ParseError("missing 'transitions' or 'rewards' section", line_no);
  for (int h = 0; h < *hd.horizon; ++h)
    for (int s = 0; s < *hd.n_states; ++s)
      for (int a = 0; a < *hd.n_actions; ++a) {
        const std::string where = std::to_string(h) + " " + std::to_string(s) + " " + std::to_string(a);
        if (!seen_t.contains({h, s, a})) throw ParseError("no transition row for " + where, line_no);
        if (!seen_r.contains({h, s, a})) throw ParseError("no reward row for " + where, line_no);
      }
  try {
    return builder->build();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
}

TabularMDP parse_mdp_spec(const std::string& text) {
  std::istringstream in(text);
  return parse_mdp_spec(in);
}

TabularMDP read_mdp_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MDP spec file " + path.string());
  return parse_mdp_spec(in);
}

std::string write_mdp_spec(const TabularMDP& mdp) {
  std::ostringstream os;
  os << "n_states " << mdp.n_states() << "\n"
     << "n_actions " << mdp.n_actions() << "\n"
     << "horizon " << mdp.horizon() << "\n"
     << "quantum " << fmt17(mdp.quantum()) << "\n"
     << "init_state " << mdp.init_state() << "\n"
     << "transitions\n";
  for (int h = 0; h < mdp.horizon(); ++h)
    for (int s = 0; s < mdp.n_states(); ++s)
      for (int a = 0; a < mdp.n_actions(); ++a) {
        os << h << ' ' << s << ' ' << a << " :";
        for (double p : mdp.transition_row(h, s, a)) os << ' ' << fmt17(p);
        os << '\n';
      }
  os << "rewards\n";
  for (int h = 0; h < mdp.horizon(); ++h)
    for (int s = 0; s < mdp.n_states(); ++s)
      for (int a = 0; a < mdp.n_actions(); ++a) {
        os << h << ' ' << s << ' ' << a << " :";
        for (const auto& r : mdp.reward(h, s, a))
          os << ' ' << fmt17(mdp.reward_value(r.ticks)) << ' ' << fmt17(r.prob);
        os << '\n';
      }
  return os.str();
}

void write_mdp_spec(const TabularMDP& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << write_mdp_spec(mdp);
}

}  // namespace ocerl
