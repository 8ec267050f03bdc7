#include "protosynth/manifest.hpp"

#include "protosynth/automaton_io.hpp"
#include "protosynth/compose.hpp"

#include <stdexcept>

namespace protosynth {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Environment: return "environment";
    case Role::Process: return "process";
    case Role::Monitor: return "monitor";
  }
  return "?";
}

std::vector<std::string> Manifest::files(Role r) const {
  std::vector<std::string> out;
  for (const auto& e : components)
    if (e.role == r) out.push_back(e.path);
  return out;
}

Manifest parse_manifest(std::string_view text, std::string_view source) {
  Manifest m;
  const std::string src(source);
  bool have_require = false;
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    const auto tok = tokenize_line(text.substr(pos, end - pos));
    pos = end + 1;
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) { throw ParseError(src, lineno, msg); };
    auto one_arg = [&] {
      if (tok.size() != 2) fail("'" + tok[0] + "' takes exactly one argument");
      return tok[1];
    };
    const auto& kw = tok[0];
    if (kw == "environment") {
      m.components.push_back({Role::Environment, one_arg()});
    } else if (kw == "process") {
      m.components.push_back({Role::Process, one_arg()});
    } else if (kw == "monitor") {
      m.components.push_back({Role::Monitor, one_arg()});
    } else if (kw == "scenarios") {
      m.scenarios.push_back(one_arg());
    } else if (kw == "require") {
      if (have_require) fail("duplicate 'require' line");
      have_require = true;
      m.profile = {false, false, false, NonBlocking::None};
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto& w = tok[i];
        if (w == "deadlock") m.profile.check_deadlock = true;
        else if (w == "safety") m.profile.check_safety = true;
        else if (w == "liveness") m.profile.check_liveness = true;
        else if (w.starts_with("nonblocking=")) {
          try {
            m.profile.nonblocking = parse_nonblocking(std::string_view(w).substr(12));
          } catch (const std::invalid_argument&) {
            fail("unknown non-blocking mode '" + w.substr(12) + "'");
          }
        } else {
          fail("unknown requirement '" + w + "'");
        }
      }
    } else if (kw == "engine") {
      if (m.engine) fail("duplicate 'engine' line");
      const auto e = one_arg();
      if (e != "explicit" && e != "bdd") fail("unknown engine '" + e + "'");
      m.engine = e;
    } else if (kw == "option") {
      if (tok.size() != 3) fail("'option' takes a key and a value");
      if (!m.options.emplace(tok[1], tok[2]).second) fail("duplicate option '" + tok[1] + "'");
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  return m;
}

std::string format_manifest(const Manifest& m) {
  std::string out;
  for (const auto& e : m.components) out += std::string(to_string(e.role)) + " " + e.path + "\n";
  for (const auto& s : m.scenarios) out += "scenarios " + s + "\n";
  const auto req = m.profile.describe();
  out += req.empty() ? "require\n" : "require " + req + "\n";
  if (m.engine) out += "engine " + *m.engine + "\n";
  for (const auto& [k, v] : m.options) out += "option " + k + " " + v + "\n";
  return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
  Manifest m = parse_manifest(read_file(path), path.string());
  m.base = path.parent_path();
  return m;
}

Project load_project(const Manifest& m) {
  Project p;
  p.manifest = m;
  auto resolve = [&](const std::string& f) { return m.base / f; };
  for (const auto& e : m.components) {
    auto autos = load_automata(resolve(e.path));
    auto& dst = e.role == Role::Process ? p.interfaces : p.instance.environment;
    dst.insert(dst.end(), autos.begin(), autos.end());
  }
  if (m.scenarios.empty()) {
    p.instance.processes = p.interfaces;
  } else {
    std::string text;
    for (const auto& s : m.scenarios) text += read_file(resolve(s)) + "\n";
    p.scenarios = parse_scenarios(text, p.interfaces, m.scenarios.front());
    p.instance.processes = compile_scenarios(*p.scenarios, p.interfaces);
  }
  p.instance.profile = m.profile;
  return p;
}

std::vector<Diagnostic> validate_project(const Project& p) {
  std::vector<Diagnostic> out;
  const auto& inst = p.instance;
  std::vector<Automaton> all = inst.processes;
  all.insert(all.end(), inst.environment.begin(), inst.environment.end());
  for (const auto& a : all)
    for (const auto& v : validate(a)) out.push_back({a.name(), v.message});
  for (const auto& a : inst.processes)
    for (const auto& [t1, t2] : determinism_conflicts(a))
      out.push_back({a.name(), "nondeterministic at state " + a.state_name(t1.src) + ": " +
                                   t1.event.name() + " and " + t2.event.name()});
  const auto shared = overlapping_outputs(all);
  if (!shared.empty()) {
    std::string names;
    for (Event e : shared) names += (names.empty() ? "" : ", ") + e.name();
    out.push_back({"composition", "events emitted by more than one component: " + names});
  }
  if (inst.processes.empty()) out.push_back({"manifest", "no process components"});
  if (!inst.profile.any()) out.push_back({"manifest", "requirement profile enables no check"});
  return out;
}

} // namespace protosynth
