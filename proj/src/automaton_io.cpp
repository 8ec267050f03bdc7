#include "protosynth/automaton_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace protosynth {

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)), line_(line) {}

std::vector<std::string> tokenize_line(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

namespace {

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    auto tokens = tokenize_line(text.substr(pos, end - pos));
    if (!tokens.empty()) f(lineno, tokens);
    pos = end + 1;
  }
}

} // namespace

std::vector<Automaton> parse_automata(std::string_view text, std::string_view source) {
  std::vector<Automaton> result;
  std::vector<bool> has_initial;
  const std::string src(source);

  for_each_line(text, [&](std::size_t line, const std::vector<std::string>& tok) {
    const std::string& kw = tok[0];
    auto fail = [&](const std::string& msg) { throw ParseError(src, line, msg); };

    if (kw == "automaton") {
      if (tok.size() != 2) fail("expected 'automaton <name>'");
      result.emplace_back(tok[1]);
      has_initial.push_back(false);
      return;
    }
    if (result.empty()) fail("'" + kw + "' before any 'automaton' line");
    Automaton& a = result.back();
    try {
      if (kw == "inputs") {
        for (std::size_t i = 1; i < tok.size(); ++i) a.add_input(Event::of(tok[i]));
      } else if (kw == "outputs") {
        for (std::size_t i = 1; i < tok.size(); ++i) a.add_output(Event::of(tok[i]));
      } else if (kw == "states") {
        for (std::size_t i = 1; i < tok.size(); ++i) a.ensure_state(tok[i]);
      } else if (kw == "initial") {
        if (tok.size() != 2) fail("expected 'initial <state>'");
        a.set_initial(a.ensure_state(tok[1]));
        has_initial.back() = true;
      } else if (kw == "error") {
        for (std::size_t i = 1; i < tok.size(); ++i) a.mark_error(a.ensure_state(tok[i]));
      } else if (kw == "accepting") {
        for (std::size_t i = 1; i < tok.size(); ++i) a.mark_accepting(a.ensure_state(tok[i]));
      } else if (kw == "trans") {
        if (tok.size() != 4) fail("expected 'trans <src> <event> <dst>'");
        const StateId s = a.ensure_state(tok[1]);
        const StateId d = a.ensure_state(tok[3]);
        a.add_transition(s, Event::of(tok[2]), d);
      } else {
        fail("unknown keyword '" + kw + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  });
  return result;
}

Automaton parse_automaton(std::string_view text, std::string_view source) {
  auto all = parse_automata(text, source);
  if (all.size() != 1)
    throw ParseError(std::string(source), 1,
                     "expected exactly one automaton, found " + std::to_string(all.size()));
  return std::move(all.front());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
}

std::vector<Automaton> load_automata(const std::filesystem::path& path) {
  return parse_automata(read_file(path), path.string());
}

std::string format_automaton(const Automaton& a) {
  std::ostringstream out;
  out << "automaton " << a.name() << '\n';
  auto list = [&](const char* kw, const auto& items, auto&& name_of) {
    if (items.empty()) return;
    out << kw;
    for (const auto& x : items) out << ' ' << name_of(x);
    out << '\n';
  };
  auto event_name = [](Event e) -> const std::string& { return e.name(); };
  auto state_name = [&](StateId q) -> const std::string& { return a.state_name(q); };
  list("inputs", a.inputs(), event_name);
  list("outputs", a.outputs(), event_name);
  std::vector<StateId> all(a.num_states());
  for (StateId q = 0; q < all.size(); ++q) all[q] = q;
  list("states", all, state_name);
  if (a.num_states() > 0) out << "initial " << a.state_name(a.initial()) << '\n';
  list("error", a.error_states(), state_name);
  list("accepting", a.accepting_states(), state_name);
  for (const auto& t : a.transitions())
    out << "trans " << a.state_name(t.src) << ' ' << t.event.name() << ' ' << a.state_name(t.dst)
        << '\n';
  return out.str();
}

namespace {

std::string dot_quote(std::string_view s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

} // namespace

std::string to_dot(const Automaton& a, std::span<const Transition> added) {
  std::ostringstream out;
  out << "digraph " << dot_quote(a.name()) << " {\n";
  out << "  rankdir=LR;\n  node [shape=circle];\n";
  if (a.num_states() > 0) {
    out << "  __start [shape=point];\n";
    out << "  __start -> " << dot_quote(a.state_name(a.initial())) << ";\n";
  }
  for (StateId q = 0; q < a.num_states(); ++q) {
    out << "  " << dot_quote(a.state_name(q));
    if (a.is_error(q))
      out << " [shape=doublecircle, color=red]";
    else if (a.is_accepting(q))
      out << " [shape=doublecircle, color=green]";
    out << ";\n";
  }
  auto emit = [&](const Transition& t, bool dashed) {
    const char* mark = a.has_input(t.event) ? "?" : (a.has_output(t.event) ? "!" : "");
    out << "  " << dot_quote(a.state_name(t.src)) << " -> " << dot_quote(a.state_name(t.dst))
        << " [label=" << dot_quote(t.event.name() + mark);
    if (dashed) out << ", style=dashed";
    out << "];\n";
  };
  for (const auto& t : a.transitions()) {
    const bool is_added = std::find(added.begin(), added.end(), t) != added.end();
    emit(t, is_added);
  }
  for (const auto& t : added)
    if (!a.has_transition(t)) emit(t, true);
  out << "}\n";
  return out.str();
}

std::string format_deltas(std::span<const Automaton> processes,
                          std::span<const std::vector<Transition>> added) {
  std::ostringstream out;
  for (std::size_t i = 0; i < processes.size(); ++i) {
    const Automaton& p = processes[i];
    out << "delta " << p.name() << '\n';
    if (i < added.size()) {
      auto sorted = added[i];
      std::sort(sorted.begin(), sorted.end());
      for (const auto& t : sorted)
        out << "trans " << p.state_name(t.src) << ' ' << t.event.name() << ' '
            << p.state_name(t.dst) << '\n';
    }
  }
  return out.str();
}

std::vector<CompletionDelta> parse_deltas(std::string_view text, std::span<const Automaton> processes,
                                          std::string_view source) {
  std::vector<CompletionDelta> result;
  const Automaton* current = nullptr;
  const std::string src(source);
  for_each_line(text, [&](std::size_t line, const std::vector<std::string>& tok) {
    auto fail = [&](const std::string& msg) { throw ParseError(src, line, msg); };
    if (tok[0] == "delta") {
      if (tok.size() != 2) fail("expected 'delta <process>'");
      current = nullptr;
      for (const auto& p : processes)
        if (p.name() == tok[1]) current = &p;
      if (!current) fail("unknown process '" + tok[1] + "'");
      result.push_back({tok[1], {}});
    } else if (tok[0] == "trans") {
      if (!current) fail("'trans' before any 'delta' line");
      if (tok.size() != 4) fail("expected 'trans <src> <event> <dst>'");
      auto s = current->find_state(tok[1]);
      auto d = current->find_state(tok[3]);
      if (!s) fail("unknown state '" + tok[1] + "' in " + current->name());
      if (!d) fail("unknown state '" + tok[3] + "' in " + current->name());
      result.back().transitions.push_back({*s, Event::of(tok[2]), *d});
    } else {
      fail("unknown keyword '" + tok[0] + "'");
    }
  });
  return result;
}

} // namespace protosynth
