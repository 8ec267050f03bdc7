#include "protosynth/automaton_io.hpp"
#include "protosynth/compose.hpp"
#include "protosynth/errors.hpp"
#include "protosynth/manifest.hpp"
#include "protosynth/reduction.hpp"
#include "protosynth/search.hpp"
#include "protosynth/symbolic.hpp"
#include "protosynth/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

namespace py = pybind11;
using namespace protosynth;

namespace {

py::dict summary(const Automaton& a) {
  py::dict d;
  d["name"] = a.name();
  d["states"] = a.num_states();
  d["transitions"] = a.num_transitions();
  return d;
}

py::dict report_dict(const VerificationReport& r) {
  py::dict d;
  d["passed"] = r.passed();
  for (const auto& f : r.findings) d[py::str(std::string(to_string(f.requirement)))] = f.passed;
  return d;
}

py::dict synthesize(const std::string& manifest, const std::string& engine, std::size_t budget,
                    std::size_t node_cap, std::uint64_t seed, unsigned threads) {
  const auto project = load_project(load_manifest(manifest));
  const auto& inst = project.instance;
  py::dict d;
  d["engine"] = engine;
  std::optional<Completion> found;
  {
    py::gil_scoped_release release;
    if (engine == "explicit") {
      SearchOptions so;
      so.budget = budget;
      so.seed = seed;
      so.threads = threads;
      const auto r = explicit_search(inst, so);
      if (r.status == SearchStatus::BudgetExhausted || r.status == SearchStatus::TimedOut)
        throw ResourceError("search stopped: " + std::string(to_string(r.status)));
      found = r.completion;
    } else if (engine == "bdd") {
      SymbolicOptions so;
      so.node_cap = node_cap;
      found = solve_symbolic(inst, so).completion;
    } else {
      throw std::invalid_argument("unknown engine '" + engine + "'");
    }
  }
  d["found"] = found.has_value();
  if (found) {
    d["added"] = found->size();
    d["delta"] = format_deltas(inst.processes, found->added);
    d["verified"] = verify_completion(inst, *found).passed();
  }
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synthesis of communicating processes from scenarios and requirements";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  m.def(
      "parse_automaton",
      [](const std::string& text) { return summary(parse_automaton(text)); },
      py::arg("text"), "Parses one automaton and returns its name and sizes.");
  m.def(
      "format_automaton", [](const std::string& text) { return format_automaton(parse_automaton(text)); },
      py::arg("text"), "Normalizes an automaton's text form.");
  m.def(
      "to_dot", [](const std::string& text) { return to_dot(parse_automaton(text)); }, py::arg("text"));

  m.def(
      "validate",
      [](const std::string& manifest) {
        py::list out;
        for (const auto& d : validate_project(load_project(load_manifest(manifest))))
          out.append(d.where + ": " + d.message);
        return out;
      },
      py::arg("manifest"), "Diagnostics for a manifest; empty when clean.");
  m.def(
      "components",
      [](const std::string& manifest) {
        const auto p = load_project(load_manifest(manifest));
        py::list out;
        for (const auto& a : p.instance.processes) out.append(summary(a));
        for (const auto& a : p.instance.environment) out.append(summary(a));
        return out;
      },
      py::arg("manifest"), "Processes (skeletons when scenarios are listed), then environment.");
  m.def(
      "verify",
      [](const std::string& manifest) {
        const auto p = load_project(load_manifest(manifest));
        const auto product = compose_completion(p.instance, empty_completion(p.instance));
        auto d = report_dict(verify_all(product, p.instance.profile));
        d["states"] = product.num_states();
        return d;
      },
      py::arg("manifest"));
  m.def("synthesize", &synthesize, py::arg("manifest"), py::arg("engine") = "explicit",
        py::arg("budget") = SearchOptions{}.budget, py::arg("node_cap") = BddManager::default_node_cap,
        py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "sat_solve",
      [](const std::string& dimacs, const std::string& engine) -> py::object {
        const auto f = parse_dimacs(dimacs);
        std::optional<Assignment> model;
        if (engine == "brute") {
          model = brute_force_sat(f);
        } else {
          const auto art = sat_to_completion(f);
          std::optional<Completion> c;
          if (engine == "explicit")
            c = explicit_search(art.instance).completion;
          else if (engine == "bdd")
            c = solve_symbolic(art.instance).completion;
          else
            throw std::invalid_argument("unknown engine '" + engine + "'");
          if (c) model = completion_to_assignment(art, *c);
        }
        if (!model) return py::none();
        py::list lits;
        for (int k = 1; k <= f.num_vars; ++k) lits.append((*model)[k - 1] ? k : -k);
        return lits;
      },
      py::arg("dimacs"), py::arg("engine") = "explicit",
      "Satisfying literals of a 3CNF formula, or None when unsatisfiable.");
  m.def(
      "reduction_sizes",
      [](const std::string& dimacs) {
        const auto art = sat_to_completion(parse_dimacs(dimacs));
        py::dict d;
        d["process_states"] = art.process.num_states();
        d["process_transitions"] = art.process.num_transitions();
        d["environment_states"] = art.environment.num_states();
        d["environment_transitions"] = art.environment.num_transitions();
        return d;
      },
      py::arg("dimacs"));
}
