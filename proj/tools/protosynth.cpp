#include "protosynth/automaton_io.hpp"
#include "protosynth/compose.hpp"
#include "protosynth/errors.hpp"
#include "protosynth/manifest.hpp"
#include "protosynth/reduction.hpp"
#include "protosynth/scenario.hpp"
#include "protosynth/search.hpp"
#include "protosynth/symbolic.hpp"
#include "protosynth/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace protosynth;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, Failed = 1, Usage = 2, Resource = 3 };

struct Globals {
  std::string format = "text";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool json() const { return format == "json"; }
};

void emit(const Globals& g, const json& doc, const std::string& text) {
  if (g.json())
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << text;
}

std::vector<Automaton> all_components(const CompletionInstance& inst, const Completion* c = nullptr) {
  auto out = c ? completed_processes(inst, *c) : inst.processes;
  out.insert(out.end(), inst.environment.begin(), inst.environment.end());
  return out;
}

std::string sizes_line(const std::vector<Automaton>& autos) {
  std::string s;
  for (const auto& a : autos)
    s += a.name() + ": " + std::to_string(a.num_states()) + " states, " + std::to_string(a.num_transitions()) +
         " transitions\n";
  return s;
}

json sizes_json(const std::vector<Automaton>& autos) {
  json arr = json::array();
  for (const auto& a : autos)
    arr.push_back({{"name", a.name()}, {"states", a.num_states()}, {"transitions", a.num_transitions()}});
  return arr;
}

Completion completion_from_deltas(const CompletionInstance& inst, const std::vector<CompletionDelta>& deltas) {
  Completion c = empty_completion(inst);
  for (const auto& d : deltas)
    for (std::size_t i = 0; i < inst.processes.size(); ++i)
      if (inst.processes[i].name() == d.process) c.added[i] = d.transitions;
  return c;
}

// validate ----------------------------------------------------------------

int cmd_validate(const Globals& g, const std::string& path) {
  const auto project = load_project(load_manifest(path));
  const auto diags = validate_project(project);
  json doc{{"clean", diags.empty()}, {"diagnostics", json::array()}};
  std::string text;
  for (const auto& d : diags) {
    doc["diagnostics"].push_back({{"where", d.where}, {"message", d.message}});
    text += d.where + ": " + d.message + "\n";
  }
  doc["components"] = sizes_json(all_components(project.instance));
  if (diags.empty()) text += "ok: " + std::to_string(all_components(project.instance).size()) + " components\n";
  emit(g, doc, text);
  return diags.empty() ? Ok : Failed;
}

// compose -----------------------------------------------------------------

int cmd_compose(const Globals& g, const std::string& path, const std::string& out, const std::string& dot,
                std::size_t max_states) {
  const auto project = load_project(load_manifest(path));
  const Product p = compose_all(all_components(project.instance), {max_states});
  std::size_t deadlocks = 0;
  for (GlobalId s = 0; s < p.num_states(); ++s)
    if (p.successors(s).empty()) ++deadlocks;
  if (!out.empty()) write_file(out, format_automaton(p.to_automaton()));
  if (!dot.empty()) write_file(dot, to_dot(p.to_automaton()));
  json doc{{"states", p.num_states()}, {"transitions", p.num_transitions()}, {"deadlocks", deadlocks},
           {"closed", p.inputs().empty()}};
  emit(g, doc,
       "product: " + std::to_string(p.num_states()) + " states, " + std::to_string(p.num_transitions()) +
           " transitions, " + std::to_string(deadlocks) + " deadlock states\n");
  return Ok;
}

// verify ------------------------------------------------------------------

int cmd_verify(const Globals& g, const std::string& path, const std::string& delta) {
  const auto project = load_project(load_manifest(path));
  const auto& inst = project.instance;
  Completion c = empty_completion(inst);
  if (!delta.empty()) c = completion_from_deltas(inst, parse_deltas(read_file(delta), inst.processes, delta));
  const Product p = compose_completion(inst, c);
  const auto report = verify_all(p, inst.profile);
  if (g.json())
    std::cout << report_to_json(p, report) << "\n";
  else
    std::cout << format_report(p, report);
  return report.passed() ? Ok : Failed;
}

// synthesize --------------------------------------------------------------

struct SynthArgs {
  std::string manifest;
  std::string engine;
  std::string out_dir;
  std::size_t budget = SearchOptions{}.budget;
  double time_limit = 0;
  std::size_t node_cap = BddManager::default_node_cap;
  std::string var_order = "default";
  std::string order = "ranked";
};

int cmd_synthesize(const Globals& g, const SynthArgs& a) {
  const auto project = load_project(load_manifest(a.manifest));
  const auto& inst = project.instance;
  const auto& opts = project.manifest.options;
  const std::string engine = !a.engine.empty() ? a.engine : project.manifest.engine.value_or("explicit");
  json doc{{"engine", engine}};
  std::optional<Completion> found;
  std::string status;
  const auto start = std::chrono::steady_clock::now();
  if (engine == "explicit") {
    SearchOptions so;
    so.budget = opts.contains("budget") ? std::stoull(opts.at("budget")) : a.budget;
    if (a.time_limit > 0)
      so.time_limit = std::chrono::milliseconds(static_cast<long long>(a.time_limit * 1000));
    so.order = a.order == "stable" ? CandidateOrder::Stable
               : a.order == "random" ? CandidateOrder::Random
                                     : CandidateOrder::Ranked;
    so.seed = g.seed;
    so.threads = g.threads;
    const auto r = explicit_search(inst, so);
    found = r.completion;
    status = std::string(to_string(r.status));
    doc["stats"] = {{"nodes", r.stats.nodes},       {"verified", r.stats.verified},
                    {"pruned", r.stats.pruned},     {"unfixable", r.stats.unfixable},
                    {"memo_hits", r.stats.memo_hits}, {"max_depth", r.stats.max_depth}};
    if (r.status == SearchStatus::BudgetExhausted || r.status == SearchStatus::TimedOut) {
      doc["status"] = status;
      emit(g, doc, "search stopped: " + status + " after " + std::to_string(r.stats.nodes) + " nodes\n");
      return Resource;
    }
  } else {
    SymbolicOptions so;
    so.node_cap = opts.contains("node-cap") ? std::stoull(opts.at("node-cap")) : a.node_cap;
    const std::size_t n = inst.processes.size() + inst.environment.size();
    if (a.var_order == "reverse")
      for (std::size_t i = n; i-- > 0;) so.component_order.push_back(i);
    so.params_first = a.var_order == "params-first";
    const auto r = solve_symbolic(inst, so);
    found = r.completion;
    status = found ? "found" : "exhausted";
    doc["stats"] = {{"state_vars", r.stats.state_vars},         {"param_vars", r.stats.param_vars},
                    {"params", r.stats.params},                 {"reach_iterations", r.stats.reach_iterations},
                    {"bdd_nodes", r.stats.bdd_nodes}, {"peak_nodes", r.stats.peak_nodes},           {"answer_nodes", r.stats.answer_nodes},
                    {"answer_count", r.stats.answer_count},     {"retries", r.stats.retries}};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  doc["seconds"] = seconds;
  doc["status"] = status;
  doc["skeletons"] = sizes_json(inst.processes);
  if (!found) {
    emit(g, doc, "no completion exists\n");
    return Failed;
  }
  const auto report = verify_completion(inst, *found);
  const auto completed = completed_processes(inst, *found);
  const auto deltas = format_deltas(inst.processes, found->added);
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "completion.delta", deltas);
    for (const auto& p : completed) write_file(fs::path(a.out_dir) / (p.name() + ".aut"), format_automaton(p));
  }
  doc["added"] = found->size();
  doc["verified"] = report.passed();
  doc["delta"] = deltas;
  std::string text = sizes_line(inst.processes);
  text += "completion found by " + engine + " engine: " + std::to_string(found->size()) + " transitions added\n";
  text += deltas;
  text += std::string("re-verification: ") + (report.passed() ? "pass" : "FAIL") + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "time: %.2f s\n", seconds);
  text += buf;
  emit(g, doc, text);
  return report.passed() ? Ok : Failed;
}

// scenario-compile ----------------------------------------------------------

int cmd_scenario_compile(const Globals& g, const std::string& input, const std::vector<std::string>& interfaces,
                         const std::string& out_dir) {
  std::vector<Automaton> compiled;
  if (fs::path(input).extension() == ".manifest") {
    const auto project = load_project(load_manifest(input));
    if (!project.scenarios) throw std::invalid_argument(input + ": manifest lists no scenarios");
    compiled = project.instance.processes;
  } else {
    std::vector<Automaton> ifs;
    for (const auto& f : interfaces) {
      auto autos = load_automata(f);
      ifs.insert(ifs.end(), autos.begin(), autos.end());
    }
    if (ifs.empty()) throw std::invalid_argument("scenario files need --interface automata");
    compiled = compile_scenarios(parse_scenarios(read_file(input), ifs, input), ifs);
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& a : compiled) write_file(fs::path(out_dir) / (a.name() + ".aut"), format_automaton(a));
  }
  std::string text = sizes_line(compiled);
  if (out_dir.empty())
    for (const auto& a : compiled) text += format_automaton(a);
  json doc{{"skeletons", sizes_json(compiled)}};
  for (std::size_t i = 0; i < compiled.size(); ++i) doc["skeletons"][i]["text"] = format_automaton(compiled[i]);
  emit(g, doc, text);
  return Ok;
}

// sat-reduce / sat-solve ----------------------------------------------------

Cnf3 load_cnf(const std::string& path) { return parse_dimacs(read_file(path), path); }

int cmd_sat_reduce(const Globals& g, const std::string& cnf, const std::string& out_dir) {
  const auto art = sat_to_completion(load_cnf(cnf));
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  write_file(dir / "process.aut", format_automaton(art.process));
  write_file(dir / "environment.aut", format_automaton(art.environment));
  Manifest m;
  m.components = {{Role::Process, "process.aut"}, {Role::Environment, "environment.aut"}};
  m.profile = art.instance.profile;
  m.engine = "explicit";
  write_file(dir / "instance.manifest", format_manifest(m));
  const json doc{{"variables", art.formula.num_vars},
                 {"clauses", art.formula.clauses.size()},
                 {"process", {{"states", art.process.num_states()}, {"transitions", art.process.num_transitions()}}},
                 {"environment",
                  {{"states", art.environment.num_states()}, {"transitions", art.environment.num_transitions()}}},
                 {"dir", dir.string()}};
  emit(g, doc,
       "process: " + std::to_string(art.process.num_states()) + " states, " +
           std::to_string(art.process.num_transitions()) + " transitions\nenvironment: " +
           std::to_string(art.environment.num_states()) + " states, " +
           std::to_string(art.environment.num_transitions()) + " transitions\nwrote " +
           (dir / "instance.manifest").string() + "\n");
  return Ok;
}

int cmd_sat_solve(const Globals& g, const std::string& cnf, const std::string& engine) {
  const auto f = load_cnf(cnf);
  std::optional<Assignment> model;
  if (engine == "brute") {
    model = brute_force_sat(f);
  } else {
    const auto art = sat_to_completion(f);
    std::optional<Completion> c;
    if (engine == "explicit") {
      SearchOptions so;
      so.seed = g.seed;
      so.threads = g.threads;
      const auto r = explicit_search(art.instance, so);
      if (r.status == SearchStatus::BudgetExhausted || r.status == SearchStatus::TimedOut)
        throw ResourceError("search stopped: " + std::string(to_string(r.status)));
      c = r.completion;
    } else {
      c = solve_symbolic(art.instance).completion;
    }
    if (c) model = completion_to_assignment(art, *c);
  }
  json doc{{"engine", engine}, {"satisfiable", model.has_value()}};
  std::string text = model ? "SAT\n" : "UNSAT\n";
  if (model) {
    std::string v = "v";
    json lits = json::array();
    for (int k = 1; k <= f.num_vars; ++k) {
      const int lit = (*model)[k - 1] ? k : -k;
      v += " " + std::to_string(lit);
      lits.push_back(lit);
    }
    text += v + " 0\n";
    doc["model"] = lits;
    doc["satisfies"] = satisfies(f, *model);
  }
  emit(g, doc, text);
  return model ? Ok : Failed;
}

// export-dot ---------------------------------------------------------------

int cmd_export_dot(const std::vector<std::string>& files, const std::string& delta, bool product) {
  std::vector<Automaton> autos;
  for (const auto& f : files) {
    auto a = load_automata(f);
    autos.insert(autos.end(), a.begin(), a.end());
  }
  std::vector<std::vector<Transition>> added(autos.size());
  if (!delta.empty())
    for (const auto& d : parse_deltas(read_file(delta), autos, delta))
      for (std::size_t i = 0; i < autos.size(); ++i)
        if (autos[i].name() == d.process) {
          added[i] = d.transitions;
          autos[i] = autos[i].completed_with(d.transitions);
        }
  if (product) {
    std::cout << to_dot(compose_all(autos).to_automaton());
    return Ok;
  }
  for (std::size_t i = 0; i < autos.size(); ++i) std::cout << to_dot(autos[i], added[i]);
  return Ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis of communicating processes from scenarios and requirements"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", g.seed, "Seed for randomized candidate order");
  app.add_option("--threads", g.threads, "Worker threads for the explicit search")->check(CLI::Range(1u, 256u));

  std::string manifest, out, dot, delta, out_dir, cnf, engine;
  std::size_t max_states = std::numeric_limits<std::size_t>::max();

  auto* validate = app.add_subcommand("validate", "Check a manifest and its components");
  validate->add_option("manifest", manifest)->required();

  auto* compose = app.add_subcommand("compose", "Compose all components of a manifest");
  compose->add_option("manifest", manifest)->required();
  compose->add_option("--out", out, "Write the product automaton");
  compose->add_option("--dot", dot, "Write the product as DOT");
  compose->add_option("--max-states", max_states, "State limit");

  auto* verify = app.add_subcommand("verify", "Verify the composed system against the manifest's requirements");
  verify->add_option("manifest", manifest)->required();
  verify->add_option("--delta", delta, "Apply a completion delta first");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synthesize", "Complete the processes of a manifest");
  synth->add_option("manifest", sa.manifest)->required();
  synth->add_option("--engine", sa.engine, "explicit or bdd (default: manifest, else explicit)")
      ->check(CLI::IsMember({"explicit", "bdd"}));
  synth->add_option("--out-dir", sa.out_dir, "Write completion.delta and completed automata");
  synth->add_option("--budget", sa.budget, "Explicit search node budget");
  synth->add_option("--time-limit", sa.time_limit, "Explicit search time limit in seconds");
  synth->add_option("--node-cap", sa.node_cap, "BDD node cap");
  synth->add_option("--var-order", sa.var_order, "BDD variable order")
      ->check(CLI::IsMember({"default", "reverse", "params-first"}));
  synth->add_option("--order", sa.order, "Explicit candidate order")
      ->check(CLI::IsMember({"ranked", "stable", "random"}));

  std::vector<std::string> interfaces;
  std::string scn;
  auto* scompile = app.add_subcommand("scenario-compile", "Compile scenarios into skeleton automata");
  scompile->add_option("input", scn, "Manifest or scenario file")->required();
  scompile->add_option("--interface", interfaces, "Process interface automata (scenario files only)");
  scompile->add_option("--out-dir", out_dir, "Write one automaton file per process");

  auto* reduce = app.add_subcommand("sat-reduce", "Build the completion instance of a 3CNF formula");
  reduce->add_option("cnf", cnf)->required();
  reduce->add_option("--out-dir", out_dir, "Output directory");

  auto* solve = app.add_subcommand("sat-solve", "Decide a 3CNF formula through its completion instance");
  solve->add_option("cnf", cnf)->required();
  engine = "explicit";
  solve->add_option("--engine", engine)->check(CLI::IsMember({"explicit", "bdd", "brute"}));

  std::vector<std::string> dot_files;
  bool product = false;
  auto* export_dot = app.add_subcommand("export-dot", "Render automata as DOT");
  export_dot->add_option("files", dot_files)->required();
  export_dot->add_option("--delta", delta, "Completion delta; added transitions are dashed");
  export_dot->add_flag("--product", product, "Render the composition of all automata");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Ok : Usage;
  }

  try {
    if (*validate) return cmd_validate(g, manifest);
    if (*compose) return cmd_compose(g, manifest, out, dot, max_states);
    if (*verify) return cmd_verify(g, manifest, delta);
    if (*synth) return cmd_synthesize(g, sa);
    if (*scompile) return cmd_scenario_compile(g, scn, interfaces, out_dir);
    if (*reduce) return cmd_sat_reduce(g, cnf, out_dir);
    if (*solve) return cmd_sat_solve(g, cnf, engine);
    if (*export_dot) return cmd_export_dot(dot_files, delta, product);
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Resource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}
