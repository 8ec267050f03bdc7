#include "protosynth/verify.hpp"

#include "json.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace protosynth {

std::string_view to_string(NonBlocking mode) {
  switch (mode) {
    case NonBlocking::None: return "none";
    case NonBlocking::Weak: return "weak";
    case NonBlocking::Strong: return "strong";
  }
  return "?";
}

NonBlocking parse_nonblocking(std::string_view text) {
  if (text == "none") return NonBlocking::None;
  if (text == "weak") return NonBlocking::Weak;
  if (text == "strong") return NonBlocking::Strong;
  throw std::invalid_argument("unknown non-blocking mode '" + std::string(text) + "'");
}

std::string_view to_string(Requirement r) {
  switch (r) {
    case Requirement::Deadlock: return "deadlock";
    case Requirement::Safety: return "safety";
    case Requirement::Liveness: return "liveness";
    case Requirement::NonBlocking: return "nonblocking";
  }
  return "?";
}

void RequirementProfile::require_nonempty() const {
  if (!any()) throw std::invalid_argument("requirement profile enables no check");
}

std::string RequirementProfile::describe() const {
  std::string s;
  auto add = [&](std::string_view w) {
    if (!s.empty()) s += ' ';
    s += w;
  };
  if (check_deadlock) add("deadlock");
  if (check_safety) add("safety");
  if (check_liveness) add("liveness");
  if (nonblocking != NonBlocking::None) add("nonblocking=" + std::string(to_string(nonblocking)));
  return s;
}

bool VerificationReport::passed() const {
  return std::all_of(findings.begin(), findings.end(), [](const Finding& f) { return f.passed; });
}

const Finding* VerificationReport::find(Requirement r) const {
  for (const auto& f : findings)
    if (f.requirement == r) return &f;
  return nullptr;
}

namespace {

constexpr GlobalId kNone = std::numeric_limits<GlobalId>::max();

// BFS tree from the initial state; parent edge index per state.
struct BfsTree {
  std::vector<GlobalId> order;
  std::vector<GlobalId> parent;
  std::vector<Event> via;
};

BfsTree bfs(const Product& p, GlobalId from) {
  BfsTree t;
  t.parent.assign(p.num_states(), kNone);
  t.via.resize(p.num_states());
  std::vector<bool> seen(p.num_states(), false);
  seen[from] = true;
  t.order.push_back(from);
  for (std::size_t head = 0; head < t.order.size(); ++head) {
    const GlobalId g = t.order[head];
    for (const auto& e : p.successors(g))
      if (!seen[e.dst]) {
        seen[e.dst] = true;
        t.parent[e.dst] = g;
        t.via[e.dst] = e.event;
        t.order.push_back(e.dst);
      }
  }
  return t;
}

Run path_to(const BfsTree& t, GlobalId target) {
  Run r;
  for (GlobalId g = target;; g = t.parent[g]) {
    r.states.push_back(g);
    if (t.parent[g] == kNone) break;
    r.events.push_back(t.via[g]);
  }
  std::reverse(r.states.begin(), r.states.end());
  std::reverse(r.events.begin(), r.events.end());
  return r;
}

template <typename Pred>
std::optional<Run> shortest_to(const Product& p, Pred&& bad) {
  if (p.num_states() == 0) return std::nullopt;
  auto t = bfs(p, Product::initial);
  for (GlobalId g : t.order)
    if (bad(g)) return path_to(t, g);
  return std::nullopt;
}

// Shortest path of length >= 1 from `from` to `to` using only states in `allowed`.
std::optional<Run> cycle_path(const Product& p, GlobalId from, GlobalId to,
                              const std::vector<bool>& allowed) {
  std::vector<GlobalId> parent(p.num_states(), kNone);
  std::vector<Event> via(p.num_states());
  std::vector<bool> seen(p.num_states(), false);
  std::deque<GlobalId> queue{from};
  auto build = [&](GlobalId last, Event last_event, GlobalId pred) {
    Run r;
    r.states.push_back(last);
    r.events.push_back(last_event);
    for (GlobalId g = pred;; g = parent[g]) {
      r.states.push_back(g);
      if (g == from) break;
      r.events.push_back(via[g]);
    }
    std::reverse(r.states.begin(), r.states.end());
    std::reverse(r.events.begin(), r.events.end());
    return r;
  };
  seen[from] = true;
  while (!queue.empty()) {
    const GlobalId g = queue.front();
    queue.pop_front();
    for (const auto& e : p.successors(g)) {
      if (!allowed[e.dst]) continue;
      if (e.dst == to) return build(to, e.event, g);
      if (!seen[e.dst]) {
        seen[e.dst] = true;
        parent[e.dst] = g;
        via[e.dst] = e.event;
        queue.push_back(e.dst);
      }
    }
  }
  return std::nullopt;
}

std::optional<Lasso> liveness_scc(const Product& p) {
  const std::size_t n = p.num_states();
  if (n == 0 || !p.has_accepting_marks()) return std::nullopt;
  // Iterative Tarjan.
  std::vector<GlobalId> index(n, kNone), low(n, 0), comp(n, kNone);
  std::vector<bool> on_stack(n, false);
  std::vector<GlobalId> stack;
  std::vector<std::pair<GlobalId, std::size_t>> call;
  GlobalId counter = 0, num_comps = 0;
  std::vector<std::vector<GlobalId>> members;
  for (GlobalId root = 0; root < n; ++root) {
    if (index[root] != kNone) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [g, i] = call.back();
      auto succ = p.successors(g);
      if (i < succ.size()) {
        const GlobalId d = succ[i++].dst;
        if (index[d] == kNone) {
          index[d] = low[d] = counter++;
          stack.push_back(d);
          on_stack[d] = true;
          call.push_back({d, 0});
        } else if (on_stack[d]) {
          low[g] = std::min(low[g], index[d]);
        }
        continue;
      }
      const GlobalId done = g;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        members.emplace_back();
        GlobalId x;
        do {
          x = stack.back();
          stack.pop_back();
          on_stack[x] = false;
          comp[x] = num_comps;
          members.back().push_back(x);
        } while (x != done);
        ++num_comps;
      }
    }
  }
  // Pick the accepting state with the smallest id lying on a cycle.
  for (GlobalId a = 0; a < n; ++a) {
    if (!p.is_accepting(a)) continue;
    const auto& scc = members[comp[a]];
    bool cyclic = scc.size() > 1;
    if (!cyclic)
      for (const auto& e : p.successors(a)) cyclic = cyclic || e.dst == a;
    if (!cyclic) continue;
    std::vector<bool> allowed(n, false);
    for (GlobalId x : scc) allowed[x] = true;
    Lasso l;
    l.stem = path_to(bfs(p, Product::initial), a);
    l.cycle = *cycle_path(p, a, a, allowed);
    return l;
  }
  return std::nullopt;
}

// Nested depth-first search with the on-stack (cyan) early exit.
std::optional<Lasso> liveness_ndfs(const Product& p) {
  const std::size_t n = p.num_states();
  if (n == 0 || !p.has_accepting_marks()) return std::nullopt;
  enum : std::uint8_t { White, Cyan, Blue };
  std::vector<std::uint8_t> color(n, White);
  std::vector<bool> red(n, false);
  struct Frame {
    GlobalId g;
    std::size_t next;
  };
  std::vector<Frame> outer;
  std::vector<Event> outer_events;  // outer_events[i] leads into outer[i + 1]
  std::vector<std::size_t> depth_of(n, 0);

  auto inner = [&](GlobalId seed) -> std::optional<Lasso> {
    std::vector<Frame> st{{seed, 0}};
    std::vector<Event> evs;
    red[seed] = true;
    while (!st.empty()) {
      auto& f = st.back();
      auto succ = p.successors(f.g);
      if (f.next == succ.size()) {
        st.pop_back();
        if (!evs.empty()) evs.pop_back();
        continue;
      }
      const auto& e = succ[f.next++];
      if (color[e.dst] == Cyan) {
        // cycle: dst ..outer.. seed ..inner.. dst
        const std::size_t k = depth_of[e.dst];
        Lasso l;
        for (std::size_t i = 0; i <= k; ++i) l.stem.states.push_back(outer[i].g);
        l.stem.events.assign(outer_events.begin(), outer_events.begin() + static_cast<std::ptrdiff_t>(k));
        for (std::size_t i = k; i < outer.size(); ++i) l.cycle.states.push_back(outer[i].g);
        l.cycle.events.assign(outer_events.begin() + static_cast<std::ptrdiff_t>(k), outer_events.end());
        for (std::size_t i = 1; i < st.size(); ++i) l.cycle.states.push_back(st[i].g);
        l.cycle.events.insert(l.cycle.events.end(), evs.begin(), evs.end());
        l.cycle.states.push_back(e.dst);
        l.cycle.events.push_back(e.event);
        return l;
      }
      if (!red[e.dst]) {
        red[e.dst] = true;
        st.push_back({e.dst, 0});
        evs.push_back(e.event);
      }
    }
    return std::nullopt;
  };

  outer.push_back({Product::initial, 0});
  color[Product::initial] = Cyan;
  depth_of[Product::initial] = 0;
  while (!outer.empty()) {
    auto& f = outer.back();
    auto succ = p.successors(f.g);
    if (f.next < succ.size()) {
      const auto& e = succ[f.next++];
      if (color[e.dst] == White) {
        color[e.dst] = Cyan;
        depth_of[e.dst] = outer.size();
        outer_events.push_back(e.event);
        outer.push_back({e.dst, 0});
      }
      continue;
    }
    const GlobalId g = f.g;
    if (p.is_accepting(g))
      if (auto l = inner(g)) return l;
    color[g] = Blue;
    outer.pop_back();
    if (!outer_events.empty()) outer_events.pop_back();
  }
  return std::nullopt;
}

bool local_has(const Automaton& a, StateId q, Event x) {
  auto out = a.outgoing(q);
  auto it = std::lower_bound(out.begin(), out.end(), x,
                             [](const Transition& t, Event e) { return t.event < e; });
  return it != out.end() && it->event == x;
}

} // namespace

std::vector<GlobalId> reachable(const Product& p) {
  if (p.num_states() == 0) return {};
  return bfs(p, Product::initial).order;
}

std::vector<GlobalId> reachable_from(const Product& p, GlobalId from) { return bfs(p, from).order; }

std::optional<Run> find_deadlock(const Product& p) {
  return shortest_to(p, [&](GlobalId g) { return p.successors(g).empty(); });
}

std::optional<Run> check_safety(const Product& p) {
  if (!p.has_error_marks()) return std::nullopt;
  return shortest_to(p, [&](GlobalId g) { return p.is_error(g); });
}

std::optional<Lasso> check_liveness_empty(const Product& p, LivenessAlgorithm algo) {
  return algo == LivenessAlgorithm::Scc ? liveness_scc(p) : liveness_ndfs(p);
}

std::optional<NonBlockingWitness> check_nonblocking(const Product& p, NonBlocking mode) {
  if (mode == NonBlocking::None || p.num_states() == 0) return std::nullopt;
  const auto comps = p.components();
  struct Role {
    Event x;
    std::size_t sender;
    std::vector<std::size_t> receivers;
  };
  std::vector<Role> roles;
  for (Event x : p.outputs()) roles.push_back({x, *p.sender_of(x), p.receivers_of(x)});

  const auto tree = bfs(p, Product::initial);

  if (mode == NonBlocking::Strong) {
    for (GlobalId g : tree.order) {
      auto s = p.state(g);
      for (const auto& r : roles) {
        if (!local_has(comps[r.sender], s[r.sender], r.x)) continue;
        bool waived = false, blocked = false;
        for (std::size_t c : r.receivers) {
          if (classify_state(comps[c], s[c]) == StateClass::Output) waived = true;
          if (!local_has(comps[c], s[c], r.x)) blocked = true;
        }
        if (!waived && blocked) return NonBlockingWitness{path_to(tree, g), r.x};
      }
    }
    return std::nullopt;
  }

  // Weak: per event, states that can reach an x-labeled edge.
  const std::size_t n = p.num_states();
  std::vector<std::uint32_t> rev_off(n + 1, 0);
  for (GlobalId g = 0; g < n; ++g)
    for (const auto& e : p.successors(g)) ++rev_off[e.dst + 1];
  for (std::size_t i = 0; i < n; ++i) rev_off[i + 1] += rev_off[i];
  std::vector<GlobalId> rev(rev_off[n]);
  {
    auto fill = rev_off;
    for (GlobalId g = 0; g < n; ++g)
      for (const auto& e : p.successors(g)) rev[fill[e.dst]++] = g;
  }
  std::vector<std::vector<bool>> can_reach(roles.size());
  for (std::size_t k = 0; k < roles.size(); ++k) {
    auto& mark = can_reach[k];
    mark.assign(n, false);
    std::vector<GlobalId> work;
    for (GlobalId g = 0; g < n; ++g)
      for (const auto& e : p.successors(g))
        if (e.event == roles[k].x && !mark[g]) {
          mark[g] = true;
          work.push_back(g);
        }
    while (!work.empty()) {
      const GlobalId g = work.back();
      work.pop_back();
      for (std::uint32_t i = rev_off[g]; i < rev_off[g + 1]; ++i)
        if (!mark[rev[i]]) {
          mark[rev[i]] = true;
          work.push_back(rev[i]);
        }
    }
  }
  for (GlobalId g : tree.order) {
    auto s = p.state(g);
    for (std::size_t k = 0; k < roles.size(); ++k)
      if (local_has(comps[roles[k].sender], s[roles[k].sender], roles[k].x) && !can_reach[k][g])
        return NonBlockingWitness{path_to(tree, g), roles[k].x};
  }
  return std::nullopt;
}

VerificationReport verify_all(const Product& p, const RequirementProfile& profile,
                              const VerifyOptions& options) {
  profile.require_nonempty();
  VerificationReport report;
  auto stop = [&] { return options.stop_at_first_failure && !report.passed(); };
  if (profile.check_safety && !stop()) {
    Finding f;
    f.requirement = Requirement::Safety;
    if ((f.run = check_safety(p))) f.passed = false;
    report.findings.push_back(std::move(f));
  }
  if (profile.check_liveness && !stop()) {
    Finding f;
    f.requirement = Requirement::Liveness;
    if ((f.lasso = check_liveness_empty(p, options.liveness))) f.passed = false;
    report.findings.push_back(std::move(f));
  }
  if (profile.check_deadlock && !stop()) {
    Finding f;
    f.requirement = Requirement::Deadlock;
    if ((f.run = find_deadlock(p))) f.passed = false;
    report.findings.push_back(std::move(f));
  }
  if (profile.nonblocking != NonBlocking::None && !stop()) {
    Finding f;
    f.requirement = Requirement::NonBlocking;
    if (auto w = check_nonblocking(p, profile.nonblocking)) {
      f.passed = false;
      f.run = std::move(w->run);
      f.event = w->event;
    }
    report.findings.push_back(std::move(f));
  }
  return report;
}

namespace {

bool follows(const Product& p, const Run& run) {
  if (run.states.empty() || run.states.size() != run.events.size() + 1) return false;
  for (std::size_t i = 0; i < run.events.size(); ++i) {
    if (run.states[i] >= p.num_states()) return false;
    bool ok = false;
    for (const auto& e : p.successors(run.states[i]))
      ok = ok || (e.event == run.events[i] && e.dst == run.states[i + 1]);
    if (!ok) return false;
  }
  return run.states.back() < p.num_states();
}

} // namespace

bool replay(const Product& p, const Run& run) {
  return follows(p, run) && run.states.front() == Product::initial;
}

bool replay(const Product& p, const Lasso& l) {
  if (!replay(p, l.stem) || !follows(p, l.cycle) || l.cycle.events.empty()) return false;
  if (l.cycle.states.front() != l.stem.last() || l.cycle.states.back() != l.cycle.states.front())
    return false;
  return std::any_of(l.cycle.states.begin(), l.cycle.states.end(),
                     [&](GlobalId g) { return p.is_accepting(g); });
}

std::string format_run(const Product& p, const Run& run) {
  std::string s = p.state_label(run.states.front());
  for (std::size_t i = 0; i < run.events.size(); ++i)
    s += " -" + run.events[i].name() + "-> " + p.state_label(run.states[i + 1]);
  return s;
}

std::string format_report(const Product& p, const VerificationReport& report) {
  std::ostringstream out;
  out << "product: " << p.num_states() << " states, " << p.num_transitions() << " transitions\n";
  for (const auto& f : report.findings) {
    out << to_string(f.requirement) << ": " << (f.passed ? "pass" : "FAIL") << '\n';
    if (f.passed) continue;
    if (f.run) {
      out << "  run (" << f.run->length() << " steps): " << format_run(p, *f.run) << '\n';
    }
    if (f.event) out << "  blocked event: " << f.event->name() << '\n';
    if (f.lasso) {
      out << "  stem: " << format_run(p, f.lasso->stem) << '\n';
      out << "  cycle: " << format_run(p, f.lasso->cycle) << '\n';
    }
  }
  out << "overall: " << (report.passed() ? "pass" : "FAIL") << '\n';
  return out.str();
}

namespace {

nlohmann::json run_json(const Product& p, const Run& run) {
  nlohmann::json j;
  j["events"] = nlohmann::json::array();
  for (Event e : run.events) j["events"].push_back(e.name());
  j["states"] = nlohmann::json::array();
  for (GlobalId g : run.states) j["states"].push_back(p.state_label(g));
  return j;
}

} // namespace

std::string report_to_json(const Product& p, const VerificationReport& report) {
  nlohmann::json doc;
  doc["passed"] = report.passed();
  doc["product"] = {{"states", p.num_states()}, {"transitions", p.num_transitions()}};
  doc["results"] = nlohmann::json::array();
  for (const auto& f : report.findings) {
    nlohmann::json r;
    r["requirement"] = std::string(to_string(f.requirement));
    r["verdict"] = f.passed ? "pass" : "fail";
    if (f.run) r["witness"] = run_json(p, *f.run);
    if (f.event) r["event"] = f.event->name();
    if (f.lasso) {
      r["witness"] = {{"stem", run_json(p, f.lasso->stem)}, {"cycle", run_json(p, f.lasso->cycle)}};
    }
    doc["results"].push_back(std::move(r));
  }
  return doc.dump(2);
}

} // namespace protosynth
