#include "ocerl/augdp.hpp"
#include "ocerl/envs.hpp"
#include "ocerl/errors.hpp"
#include "ocerl/experiment.hpp"
#include "ocerl/optimist.hpp"
#include "ocerl/oracle.hpp"
#include "ocerl/polopt.hpp"
#include "ocerl/risk.hpp"
#include "ocerl/spec_file.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ocerl;

namespace {

DiscreteDist to_dist(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<Atom> a;
  for (const auto& [v, p] : atoms) a.push_back({v, p});
  return DiscreteDist(std::move(a));
}

std::vector<std::pair<double, double>> from_dist(const DiscreteDist& d) {
  std::vector<std::pair<double, double>> out;
  for (const auto& a : d.atoms()) out.emplace_back(a.value, a.prob);
  return out;
}

UtilitySpec utility(const std::string& text, double z_min, double z_max) {
  const auto us = parse_utilities(text, z_min, z_max);
  if (us.size() != 1) throw ConfigError("expected exactly one utility");
  return us.front();
}

}  // namespace

PYBIND11_MODULE(ocerl, m) {
  m.doc() = "Risk-sensitive tabular RL with optimized certainty equivalents";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RefusalError>(m, "RefusalError", PyExc_RuntimeError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);

  py::class_<UtilitySpec>(m, "Utility")
      .def(py::init(&utility), py::arg("spec"), py::arg("z_min") = 0.0, py::arg("z_max") = 1.0,
           "From 'mean', 'cvar:TAU', 'entropic:BETA', 'mv:C' or 'meancvar:K1,K2'.")
      .def("__call__", &UtilitySpec::operator())
      .def("vmax", &UtilitySpec::vmax)
      .def_property_readonly("label", &UtilitySpec::label)
      .def("__repr__", [](const UtilitySpec& u) { return "<Utility " + u.label() + ">"; });

  m.def(
      "oce",
      [](const UtilitySpec& u, const std::vector<std::pair<double, double>>& atoms) {
        const auto r = oce_dual(u, to_dist(atoms));
        return py::make_tuple(r.value, r.b_star);
      },
      py::arg("utility"), py::arg("atoms"), "(OCE, maximizing b) of a list of (value, prob).");
  m.def("cvar", [](double tau, const std::vector<std::pair<double, double>>& atoms) {
    return cvar_closed_form(tau, to_dist(atoms));
  });
  m.def("entropic", [](double beta, const std::vector<std::pair<double, double>>& atoms) {
    return entropic_closed_form(beta, to_dist(atoms));
  });
  m.def("mean_variance", [](double c, const std::vector<std::pair<double, double>>& atoms) {
    return mean_variance_direct(c, to_dist(atoms));
  });

  py::class_<TabularMDP>(m, "MDP")
      .def_property_readonly("n_states", &TabularMDP::n_states)
      .def_property_readonly("n_actions", &TabularMDP::n_actions)
      .def_property_readonly("horizon", &TabularMDP::horizon)
      .def_property_readonly("quantum", &TabularMDP::quantum)
      .def("to_spec", [](const TabularMDP& mdp) { return write_mdp_spec(mdp); })
      .def("__eq__", [](const TabularMDP& a, const TabularMDP& b) { return a == b; });

  m.def("synthetic_mdp", &build_synthetic_mdp);
  m.def("load_mdp", &load_mdp, py::arg("source"), "'synthetic', 'random:SEED' or a spec file path.");
  m.def("parse_mdp", py::overload_cast<const std::string&>(&parse_mdp_spec), py::arg("text"));
  m.def("return_range", &return_range);

  m.def(
      "solve",
      [](const TabularMDP& mdp, const UtilitySpec& u, int refine) {
        const auto lattice = build_lattice(mdp, refine);
        const auto opt = solve_optimal_oce(mdp, lattice, u);
        const auto law = exact_return_distribution(mdp, lattice, opt.policy, opt.b1_index);
        py::dict d;
        d["value"] = opt.value;
        d["budget"] = opt.budget;
        d["distribution"] = from_dist(law);
        return d;
      },
      py::arg("mdp"), py::arg("utility"), py::arg("refine") = 1,
      "Optimal OCE through the budget-augmented MDP.");

  m.def(
      "brute_force",
      [](const TabularMDP& mdp, const UtilitySpec& u, std::uint64_t cap) {
        OracleOptions o;
        o.policy_cap = cap;
        const auto r = brute_force_oracle(mdp, u, o);
        py::dict d;
        d["value"] = r.value;
        d["distribution"] = from_dist(r.distribution);
        d["policies"] = r.policy_count;
        return d;
      },
      py::arg("mdp"), py::arg("utility"), py::arg("policy_cap") = 1'000'000);

  m.def("best_markovian", [](const TabularMDP& mdp, const UtilitySpec& u) {
    return best_markovian(mdp, u).value;
  });

  m.def(
      "ucbvi",
      [](const TabularMDP& mdp, const UtilitySpec& u, int rounds, std::uint64_t seed, int refine,
         double bonus_scale) {
        const auto lattice = build_lattice(mdp, refine);
        OptimistOptions o;
        o.rounds = rounds;
        o.seed = seed;
        o.ucbvi.bonus_scale = bonus_scale;
        const auto run = [&] {
          py::gil_scoped_release release;
          return run_meta_optimistic(mdp, lattice, u, o);
        }();
        py::dict d;
        std::vector<double> oce, regret, b_hat;
        for (const auto& l : run.logs) {
          oce.push_back(l.oce);
          regret.push_back(l.cum_regret);
          b_hat.push_back(l.b_hat);
        }
        d["oce_star"] = run.oce_star;
        d["oce"] = oce;
        d["cum_regret"] = regret;
        d["b_hat"] = b_hat;
        d["final"] = run.logs.back().report;
        return d;
      },
      py::arg("mdp"), py::arg("utility"), py::arg("rounds") = 2000, py::arg("seed") = 0,
      py::arg("refine") = 8, py::arg("bonus_scale") = 1.0);

  m.def(
      "npg",
      [](const TabularMDP& mdp, const UtilitySpec& u, int rounds, double eta, int refine) {
        const auto lattice = build_lattice(mdp, refine);
        PoOptions o;
        o.rounds = rounds;
        o.eta = eta;
        const auto run = [&] {
          py::gil_scoped_release release;
          return run_meta_po(mdp, lattice, u, o);
        }();
        py::dict d;
        std::vector<double> rlb, oce;
        for (const auto& l : run.logs) {
          rlb.push_back(l.rlb);
          oce.push_back(l.oce);
        }
        d["oce_star"] = run.oce_star;
        d["rlb"] = rlb;
        d["oce"] = oce;
        d["final"] = run.logs.back().report;
        return d;
      },
      py::arg("mdp"), py::arg("utility"), py::arg("rounds") = 300, py::arg("eta") = 0.0,
      py::arg("refine") = 8);
}
