#include "ocerl/envs.hpp"
#include "ocerl/errors.hpp"
#include "ocerl/experiment.hpp"
#include "ocerl/spec_file.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ocerl;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ocerl_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

int parse_error_line(const std::string& text) {
  try {
    parse_mdp_spec(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

const std::string kSpec =
    "# two-state example\n"
    "n_states 2\n"
    "n_actions 1\n"
    "horizon 1\n"
    "quantum 0.5\n"
    "init_state 0\n"
    "transitions\n"
    "0 0 0 : 0.25 0.75\n"
    "0 1 0 : 0 1\n"
    "rewards\n"
    "0 0 0 : 0 0.5 1.5 0.5\n"
    "0 1 0 : 0.5 1\n";

}  // namespace

TEST_CASE("spec files round trip exactly") {
  const auto mdp = parse_mdp_spec(kSpec);
  CHECK(mdp.n_states() == 2);
  CHECK(mdp.transition(0, 0, 0, 1) == 0.75);
  CHECK(mdp.reward(0, 0, 0).size() == 2);
  CHECK(parse_mdp_spec(write_mdp_spec(mdp)) == mdp);
  const auto syn = build_synthetic_mdp();
  const auto text = write_mdp_spec(syn);
  CHECK(parse_mdp_spec(text) == syn);
  CHECK(write_mdp_spec(parse_mdp_spec(text)) == text);
  RandomMdpOptions o;
  o.n_states = 3;
  o.horizon = 3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = random_mdp(seed, o);
    CHECK(parse_mdp_spec(write_mdp_spec(m)) == m);
  }
  const auto dir = scratch("spec");
  fs::create_directories(dir);
  write_mdp_spec(syn, dir / "syn.mdp");
  CHECK(read_mdp_spec(dir / "syn.mdp") == syn);
  CHECK(load_mdp((dir / "syn.mdp").string()) == syn);
  CHECK_THROWS_AS(read_mdp_spec(dir / "missing.mdp"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("spec parse errors carry line numbers") {
  auto edit = [](const std::string& from, const std::string& to) {
    auto s = kSpec;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK(parse_error_line(edit("0 0 0 : 0.25 0.75", "0 0 0 : 0.25 0.5")) == 8);
  CHECK(parse_error_line(edit("0 0 0 : 0.25 0.75", "0 0 0 : -0.25 1.25")) == 8);
  CHECK(parse_error_line(edit("0 0 0 : 0 0.5 1.5 0.5", "0 0 0 : 0 0.5 1.2 0.5")) == 11);
  CHECK(parse_error_line(edit("0 1 0 : 0 1\n", "0 0 0 : 0 1\n")) == 9);
  CHECK(parse_error_line(edit("0 1 0 : 0 1\n", "0 2 0 : 0 1\n")) == 9);
  CHECK(parse_error_line(edit("horizon 1", "horizon x")) == 4);
  CHECK(parse_error_line(edit("horizon 1", "depth 1")) == 4);
  CHECK(parse_error_line(edit("0 1 0 : 0.5 1\n", "")) == 11);
  CHECK(parse_error_line(edit("0 0 0 : 0.25 0.75", "0 0 0 0.25 0.75")) == 8);
  CHECK(parse_error_line("") >= 0);
  CHECK_THROWS_AS(parse_mdp_spec(""), ParseError);
}

TEST_CASE("builtin MDP sources") {
  CHECK(load_mdp("synthetic") == build_synthetic_mdp());
  CHECK(load_mdp("random:7") == random_mdp(7));
  CHECK_THROWS_AS(load_mdp("random:x"), ConfigError);
  CHECK_THROWS_AS(load_mdp("/no/such/file.mdp"), ConfigError);
  const auto [lo, hi] = return_range(build_synthetic_mdp());
  CHECK(lo == 0.0);
  CHECK(hi == 2.5);
}

TEST_CASE("utility lists") {
  const auto t3 = parse_utilities("benchmark", 0.0, 2.5);
  REQUIRE(t3.size() == 6);
  CHECK(t3[0] == UtilitySpec::mean_variance(1.0, 0.0, 2.5));
  CHECK(t3[3] == UtilitySpec::entropic(-2.0, 0.0, 2.5));
  CHECK(t3[4] == UtilitySpec::cvar(0.25, 0.0, 2.5));
  CHECK(t3 == benchmark_utilities(0.0, 2.5));
  const auto l = parse_utilities("mean;cvar:0.5;entropic:-3;mv:0.5;meancvar:0.2,3", 0.0, 1.0);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == UtilitySpec::mean(0.0, 1.0));
  CHECK(l[4] == UtilitySpec::mean_cvar(0.2, 3.0, 0.0, 1.0));
  for (const char* bad : {"", "cvar", "cvar:2", "cvar:x", "entropic:1", "mv:-1", "meancvar:2", "foo:1"})
    CHECK_THROWS_AS(parse_utilities(bad, 0.0, 1.0), ConfigError);
  CHECK(parse_algorithm("npg") == Algorithm::Npg);
  CHECK(algorithm_name(Algorithm::ExactDp) == "exact-dp");
  CHECK_THROWS_AS(parse_algorithm("sgd"), ConfigError);
}

TEST_CASE("best Markovian policies on the synthetic MDP") {
  const auto mdp = build_synthetic_mdp();
  CHECK(best_markovian(mdp, UtilitySpec::cvar(0.25, 0.0, 2.5)).value == Approx(0.5));
  CHECK(best_markovian(mdp, UtilitySpec::cvar(0.5, 0.0, 2.5)).value == Approx(1.0));
  const auto e1 = best_markovian(mdp, UtilitySpec::entropic(-1.0, 0.0, 2.5));
  CHECK(e1.value == Approx(1.2537).epsilon(1e-4));
  CHECK(e1.actions[2] == 0);
  CHECK(best_markovian(mdp, UtilitySpec::mean_variance(1.0, 0.0, 2.5)).value == Approx(0.953125));
  CHECK(best_markovian(mdp, UtilitySpec::mean_variance(2.0, 0.0, 2.5)).value == Approx(0.5));
}

TEST_CASE("summary statistics") {
  const auto one = summarize({2.0});
  CHECK(one.mean == 2.0);
  CHECK(one.sd == 0.0);
  CHECK(one.half == 0.0);
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.sd == Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.half == Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(csv_number(0.5) == "0.500000000000");
  CHECK(csv_number(-1e-15) == "0.000000000000");
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(validate(c));
  c.refine = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.delta = 1.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.seeds.clear();
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.algorithm = Algorithm::Ucbvi;
  CHECK(effective_rounds(c) == 2000);
  c.algorithm = Algorithm::Npg;
  CHECK(effective_rounds(c) == 300);
  c.rounds = 7;
  CHECK(effective_rounds(c) == 7);
}

TEST_CASE("exact solve output") {
  ExperimentConfig c;
  c.out_dir = scratch("solve");
  const auto res = run_experiment(c);
  REQUIRE(res.rows.size() == 6);
  CHECK(res.rows[0].oce_star == Approx(1.06640625).epsilon(1e-9));
  CHECK(res.rows[1].report_star == Approx(0.8203125).epsilon(1e-9));
  CHECK(res.rows[4].oce_star == Approx(0.75));
  CHECK(res.rows[4].best_markovian == Approx(0.5));
  CHECK(first_line(c.out_dir / "solve.csv") == "risk,oce_star,b_star,report_star,best_markovian,oracle,abs_diff");
  fs::remove_all(c.out_dir);
}

TEST_CASE("oracle output on a constant MDP") {
  const auto dir = scratch("oracle");
  fs::create_directories(dir);
  write_mdp_spec(constant_mdp(3, 0.5, 0.5), dir / "const.mdp");
  ExperimentConfig c;
  c.mdp = (dir / "const.mdp").string();
  c.utility = "cvar:0.5";
  c.algorithm = Algorithm::Oracle;
  c.out_dir = dir / "out";
  const auto res = run_experiment(c);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].oce_star == Approx(1.5));
  CHECK(first_line(c.out_dir / "oracle.csv") == "risk,oracle,dp,abs_diff,policies,distinct_laws");
  fs::remove_all(dir);
}

TEST_CASE("learning runs are byte-identical and well-formed") {
  for (auto algo : {Algorithm::Ucbvi, Algorithm::Npg}) {
    ExperimentConfig c;
    c.algorithm = algo;
    c.utility = "cvar:0.25;mv:1";
    c.rounds = 40;
    c.seeds = {0, 1, 2};
    const auto dir_a = scratch("run_a");
    c.out_dir = dir_a;
    const auto a = run_experiment(c);
    c.out_dir = scratch("run_b");
    const auto b = run_experiment(c);
    REQUIRE(a.files.size() == b.files.size());
    CHECK(a.files.size() == 4);
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      CHECK(a.files[i].filename() == b.files[i].filename());
      CHECK(slurp(a.files[i]) == slurp(b.files[i]));
    }
    const auto name = algorithm_name(algo);
    const auto rounds = dir_a / (name + "_CVaR_0.25_rounds.csv");
    CHECK(first_line(rounds) == "round,seed,b_hat,oce_exact,rlb_or_vhat,regret_cum");
    std::ifstream in(rounds);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 1 + 40 * 3);
    CHECK(first_line(dir_a / (name + "_summary.csv")).rfind("risk,metric,n_seeds,mean,sd,ci_half", 0) == 0);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0].finals.size() == 3);
    CHECK(a.rows[1].metric == "mean_minus_c_var");
    fs::remove_all(c.out_dir);
    fs::remove_all(dir_a);
  }
}

TEST_CASE("unwritable output directory is a config error") {
  const auto dir = scratch("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  ExperimentConfig c;
  c.out_dir = dir / "file" / "sub";
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  fs::remove_all(dir);
}
