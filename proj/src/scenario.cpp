#include "protosynth/scenario.hpp"

#include "protosynth/automaton_io.hpp"
#include "protosynth/compose.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace protosynth {

const Lane* Scenario::lane(std::string_view process) const {
  for (const auto& l : lanes)
    if (l.process == process) return &l;
  return nullptr;
}

const Substitution* ScenarioSet::substitution(std::string_view name) const {
  for (const auto& s : substitutions)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

const Automaton* find_interface(std::span<const Automaton> interfaces, std::string_view name) {
  for (const auto& a : interfaces)
    if (a.name() == name) return &a;
  return nullptr;
}

// Empty string when the item fits the interface, else a message.
std::string lane_item_problem(const LaneItem& item, const Automaton& iface) {
  if (item.kind == LaneItem::Kind::Send && !iface.has_output(item.event))
    return "'" + item.event.name() + "' is not an output of " + iface.name();
  if (item.kind == LaneItem::Kind::Receive && !iface.has_input(item.event))
    return "'" + item.event.name() + "' is not an input of " + iface.name();
  return {};
}

} // namespace

ScenarioSet parse_scenarios(std::string_view text, std::span<const Automaton> interfaces,
                            std::string_view source) {
  ScenarioSet set;
  const std::string src(source);
  enum class Block { None, Subst, Scenario };
  Block block = Block::None;
  Lane* lane = nullptr;
  const Automaton* iface = nullptr;
  std::vector<std::size_t> scenario_lines;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    const auto tok = tokenize_line(text.substr(pos, end - pos));
    pos = end + 1;
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) { throw ParseError(src, lineno, msg); };
    const std::string& kw = tok[0];

    if (kw == "subst") {
      if (tok.size() != 2) fail("expected 'subst <name>'");
      if (set.substitution(tok[1])) fail("duplicate substitution '" + tok[1] + "'");
      set.substitutions.push_back({tok[1], {}, {}});
      block = Block::Subst;
      lane = nullptr;
    } else if (kw == "map" || kw == "maplabel") {
      if (block != Block::Subst) fail("'" + kw + "' outside a subst block");
      if (tok.size() != 3) fail("expected '" + kw + " <from> <to>'");
      auto& sub = set.substitutions.back();
      if (kw == "map") {
        Event from = Event::of(tok[1]), to = Event::of(tok[2]);
        if (sub.events.contains(from)) fail("event '" + tok[1] + "' mapped twice");
        for (const auto& [k, v] : sub.events)
          if (v == to) fail("substitution is not injective on '" + tok[2] + "'");
        sub.events.emplace(from, to);
      } else {
        if (sub.labels.contains(tok[1])) fail("label '" + tok[1] + "' mapped twice");
        sub.labels.emplace(tok[1], tok[2]);
      }
    } else if (kw == "scenario") {
      if (tok.size() != 2 && !(tok.size() == 4 && tok[2] == "symmetric"))
        fail("expected 'scenario <name> [symmetric <subst>]'");
      Scenario s;
      s.name = tok[1];
      if (tok.size() == 4) s.symmetric_under = tok[3];
      set.scenarios.push_back(std::move(s));
      scenario_lines.push_back(lineno);
      block = Block::Scenario;
      lane = nullptr;
    } else if (kw == "lane") {
      if (block != Block::Scenario) fail("'lane' outside a scenario");
      if (tok.size() != 2) fail("expected 'lane <process>'");
      iface = find_interface(interfaces, tok[1]);
      if (!iface) fail("unknown process '" + tok[1] + "'");
      if (set.scenarios.back().lane(tok[1])) fail("duplicate lane for '" + tok[1] + "'");
      set.scenarios.back().lanes.push_back({tok[1], {}});
      lane = &set.scenarios.back().lanes.back();
    } else if (kw[0] == '!' || kw[0] == '?' || kw[0] == '@') {
      if (!lane) fail("lane item outside a lane");
      for (std::size_t i = 0; i < tok.size(); ++i) {
        const char marker = tok[i][0];
        std::string operand;
        if (marker != '!' && marker != '?' && marker != '@') fail("expected '!', '?' or '@' before '" + tok[i] + "'");
        if (tok[i].size() > 1) {
          operand = tok[i].substr(1);
        } else {
          if (i + 1 == tok.size()) fail(std::string("missing operand after '") + marker + "'");
          operand = tok[++i];
        }
        LaneItem item = marker == '@'   ? LaneItem::mark(operand)
                        : marker == '!' ? LaneItem::send(Event::of(operand))
                                        : LaneItem::receive(Event::of(operand));
        if (auto problem = lane_item_problem(item, *iface); !problem.empty()) fail(problem);
        lane->items.push_back(std::move(item));
      }
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }

  if (set.scenarios.empty()) throw ParseError(src, lineno, "no scenarios");
  for (std::size_t i = 0; i < set.scenarios.size(); ++i) {
    const auto& s = set.scenarios[i];
    if (s.lanes.empty()) throw ParseError(src, scenario_lines[i], "scenario '" + s.name + "' has no lanes");
    if (s.symmetric_under && !set.substitution(*s.symmetric_under))
      throw ParseError(src, scenario_lines[i], "unknown substitution '" + *s.symmetric_under + "'");
  }
  return set;
}

std::string format_scenarios(const ScenarioSet& set) {
  std::ostringstream out;
  for (const auto& sub : set.substitutions) {
    out << "subst " << sub.name << '\n';
    for (const auto& [from, to] : sub.events) out << "map " << from.name() << ' ' << to.name() << '\n';
    for (const auto& [from, to] : sub.labels) out << "maplabel " << from << ' ' << to << '\n';
  }
  for (const auto& s : set.scenarios) {
    out << "scenario " << s.name;
    if (s.symmetric_under) out << " symmetric " << *s.symmetric_under;
    out << '\n';
    for (const auto& lane : s.lanes) {
      out << "lane " << lane.process << '\n';
      for (const auto& item : lane.items) {
        switch (item.kind) {
          case LaneItem::Kind::Send: out << "! " << item.event.name() << '\n'; break;
          case LaneItem::Kind::Receive: out << "? " << item.event.name() << '\n'; break;
          case LaneItem::Kind::Label: out << "@ " << item.label << '\n'; break;
        }
      }
    }
  }
  return out.str();
}

Scenario apply_symmetry(const Scenario& s, const Substitution& sub) {
  Scenario r = s;
  for (auto& lane : r.lanes)
    for (auto& item : lane.items) {
      if (item.kind == LaneItem::Kind::Label) {
        if (auto it = sub.labels.find(item.label); it != sub.labels.end()) item.label = it->second;
        continue;
      }
      auto it = sub.events.find(item.event);
      if (it == sub.events.end())
        throw ScenarioError("substitution '" + sub.name + "' does not map event '" + item.event.name() +
                            "' of scenario '" + s.name + "'");
      item.event = it->second;
    }
  return r;
}

Skeleton build_skeleton(std::span<const Scenario> scenarios, const Automaton& iface) {
  Skeleton sk;
  Automaton& a = sk.automaton;
  a.set_name(iface.name());
  for (Event e : iface.inputs()) a.add_input(e);
  for (Event e : iface.outputs()) a.add_output(e);
  a.add_state("h0");
  a.set_initial(0);
  sk.labels.emplace_back();
  for (const auto& s : scenarios) {
    const Lane* lane = s.lane(iface.name());
    if (!lane) continue;
    StateId cur = 0;
    if (!s.starts_at_initial) {
      cur = a.add_state("h" + std::to_string(a.num_states()));
      sk.labels.emplace_back();
    }
    for (const auto& item : lane->items) {
      if (item.kind == LaneItem::Kind::Label) {
        sk.labels[cur].push_back(item.label);
        continue;
      }
      if (auto problem = lane_item_problem(item, iface); !problem.empty())
        throw ScenarioError("scenario '" + s.name + "': " + problem);
      std::optional<StateId> next;
      for (const auto& t : a.outgoing(cur))
        if (t.event == item.event) next = t.dst;
      if (!next) {
        next = a.add_state("h" + std::to_string(a.num_states()));
        sk.labels.emplace_back();
        a.add_transition(cur, item.event, *next);
      }
      cur = *next;
    }
  }
  for (auto& l : sk.labels) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return sk;
}

Skeleton lane_to_skeleton(const Scenario& s, const Automaton& iface) {
  return build_skeleton(std::span<const Scenario>(&s, 1), iface);
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

} // namespace

Skeleton merge_labels(const Skeleton& sk) {
  const Automaton& a = sk.automaton;
  const std::size_t n = a.num_states();
  UnionFind uf(n);
  std::map<std::string, StateId> first_with;
  for (StateId q = 0; q < n; ++q)
    for (const auto& l : sk.labels[q]) {
      auto [it, fresh] = first_with.emplace(l, q);
      if (!fresh) uf.unite(it->second, q);
    }
  const auto trans = a.transitions();
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<std::size_t, Event>, StateId> target;
    for (const auto& t : trans) {
      auto [it, fresh] = target.emplace(std::make_pair(uf.find(t.src), t.event), t.dst);
      if (!fresh && uf.unite(it->second, t.dst)) changed = true;
    }
  }

  // Number classes breadth-first from the initial class.
  std::vector<std::size_t> cls(n);
  for (StateId q = 0; q < n; ++q) cls[q] = uf.find(q);
  std::map<std::size_t, std::vector<Transition>> out_of;
  for (const auto& t : trans) out_of[cls[t.src]].push_back(t);
  for (auto& [c, ts] : out_of)
    std::stable_sort(ts.begin(), ts.end(), [](const Transition& x, const Transition& y) { return x.event < y.event; });
  std::map<std::size_t, StateId> number;
  std::vector<std::size_t> order{cls[a.initial()]};
  number[order[0]] = 0;
  for (std::size_t head = 0; head < order.size(); ++head)
    for (const auto& t : out_of[order[head]])
      if (number.emplace(cls[t.dst], static_cast<StateId>(order.size())).second) order.push_back(cls[t.dst]);
  for (StateId q = 0; q < n; ++q)
    if (!number.contains(cls[q]))
      throw ScenarioError(a.name() + ": history state " + a.state_name(q) +
                          " is not connected to the initial state by any label");

  std::vector<std::vector<std::string>> labels(order.size());
  for (StateId q = 0; q < n; ++q) {
    auto& l = labels[number[cls[q]]];
    l.insert(l.end(), sk.labels[q].begin(), sk.labels[q].end());
  }
  std::set<std::string> taken;
  for (auto& l : labels) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    if (!l.empty()) taken.insert(l.front());
  }

  Skeleton r;
  Automaton& m = r.automaton;
  m.set_name(a.name());
  for (Event e : a.inputs()) m.add_input(e);
  for (Event e : a.outputs()) m.add_output(e);
  std::size_t counter = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::string name;
    if (!labels[k].empty() && taken.count(labels[k].front()) && m.find_state(labels[k].front()) == std::nullopt) {
      name = labels[k].front();
    } else {
      do name = "q" + std::to_string(counter++);
      while (taken.count(name));
    }
    m.add_state(name);
  }
  m.set_initial(0);
  for (const auto& t : trans) m.add_transition(number[cls[t.src]], t.event, number[cls[t.dst]]);
  r.labels = std::move(labels);

  if (auto conflicts = determinism_conflicts(m); !conflicts.empty()) {
    std::string msg = "merging labels makes " + m.name() + " non-deterministic:";
    for (const auto& [t1, t2] : conflicts) {
      auto show = [&](const Transition& t) {
        return " (" + m.state_name(t.src) + ", " + t.event.name() + ", " + m.state_name(t.dst) + ")";
      };
      msg += show(t1) + " vs" + show(t2) + ";";
    }
    msg.pop_back();
    throw ScenarioError(msg);
  }
  return r;
}

std::vector<Scenario> expand_scenarios(const ScenarioSet& set, const CompileOptions& options) {
  std::vector<Scenario> all;
  for (const auto& s : set.scenarios) {
    all.push_back(s);
    if (options.expand_symmetric && s.symmetric_under) {
      const Substitution* sub = set.substitution(*s.symmetric_under);
      if (!sub) throw ScenarioError("unknown substitution '" + *s.symmetric_under + "'");
      Scenario mirrored = apply_symmetry(s, *sub);
      mirrored.name += "~" + sub->name;
      mirrored.symmetric_under.reset();
      mirrored.starts_at_initial = false;
      all.push_back(std::move(mirrored));
    }
  }
  return all;
}

std::vector<Automaton> compile_scenarios(const ScenarioSet& set, std::span<const Automaton> interfaces,
                                         const CompileOptions& options) {
  const auto all = expand_scenarios(set, options);
  std::vector<Automaton> result;
  for (const auto& iface : interfaces) result.push_back(merge_labels(build_skeleton(all, iface)).automaton);
  return result;
}

bool scenario_replayable(const Scenario& s, std::span<const Automaton> components) {
  std::vector<std::vector<Event>> seq;
  std::vector<std::size_t> comp_of;
  for (const auto& lane : s.lanes) {
    std::optional<std::size_t> c;
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i].name() == lane.process) c = i;
    if (!c) throw ScenarioError("no component named '" + lane.process + "'");
    comp_of.push_back(*c);
    seq.emplace_back();
    for (const auto& item : lane.items)
      if (item.kind != LaneItem::Kind::Label) seq.back().push_back(item.event);
  }
  const Product p = compose_all({components.begin(), components.end()});

  using Key = std::vector<std::uint32_t>;  // global state followed by lane positions
  std::set<Key> seen;
  std::deque<Key> queue;
  Key start(1 + seq.size(), 0);
  start[0] = Product::initial;
  seen.insert(start);
  queue.push_back(start);
  while (!queue.empty()) {
    Key cur = std::move(queue.front());
    queue.pop_front();
    bool done = true;
    for (std::size_t k = 0; k < seq.size(); ++k) done = done && cur[1 + k] == seq[k].size();
    if (done) return true;
    for (const auto& e : p.successors(cur[0])) {
      Key next = cur;
      next[0] = e.dst;
      bool ok = true;
      for (std::size_t k = 0; k < seq.size() && ok; ++k) {
        const Automaton& a = components[comp_of[k]];
        if (!a.has_input(e.event) && !a.has_output(e.event)) continue;
        if (cur[1 + k] < seq[k].size() && seq[k][cur[1 + k]] == e.event)
          ++next[1 + k];
        else
          ok = false;
      }
      if (ok && seen.insert(next).second) queue.push_back(std::move(next));
    }
  }
  return false;
}

} // namespace protosynth
