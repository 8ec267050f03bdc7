#include "protosynth/symbolic.hpp"

#include "protosynth/errors.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace protosynth {

namespace {

unsigned bits_for(std::size_t values) {
  unsigned b = 0;
  while ((std::size_t{1} << b) < values) ++b;
  return b;
}

} // namespace

Bdd SymbolicSystem::state_is(std::span<const StateId> global) {
  Bdd r = BddManager::True;
  for (std::size_t c = 0; c < components.size(); ++c)
    r = mgr->apply_and(r, mgr->value_cube(cur_bits[c], global[c]));
  return r;
}

Bdd SymbolicSystem::valuation_of(const Completion& c) {
  std::vector<std::vector<Transition>> left(num_processes);
  for (std::size_t i = 0; i < c.added.size() && i < num_processes; ++i) left[i] = c.added[i];
  Bdd r = BddManager::True;
  for (const auto& p : params) {
    std::uint64_t code = p.none_code();
    auto& l = left[p.process];
    for (auto it = l.begin(); it != l.end(); ++it)
      if (it->src == p.state && it->event == p.event) {
        code = it->dst;
        l.erase(it);
        break;
      }
    r = mgr->apply_and(r, mgr->value_cube(p.bits, code));
  }
  for (const auto& l : left)
    if (!l.empty()) return BddManager::False;
  return r;
}

Completion SymbolicSystem::decode(std::span<const std::int8_t> assignment) const {
  Completion c;
  c.added.resize(num_processes);
  for (const auto& p : params) {
    std::uint64_t code = 0;
    for (std::size_t b = 0; b < p.bits.size(); ++b)
      if (assignment[p.bits[b]] != 0) code |= std::uint64_t{1} << b;
    if (code == p.none_code()) continue;
    if (code >= components[p.process].num_states())
      throw std::logic_error("parameter value outside the state domain");
    c.added[p.process].push_back({p.state, p.event, static_cast<StateId>(code)});
  }
  for (auto& a : c.added) std::sort(a.begin(), a.end());
  return c;
}

Bdd SymbolicSystem::image(Bdd s) {
  Bdd r = BddManager::False;
  Pin pin(*this, {&s, &r});
  for (const auto& rel : relations) {
    Bdd moved = mgr->and_exists(s, rel.relation, rel.cur_cube);
    moved = mgr->rename(moved, rel.to_cur);
    r = mgr->apply_or(r, moved);
    checkpoint();
  }
  return r;
}

Bdd SymbolicSystem::preimage(Bdd s, Bdd within) {
  Bdd r = BddManager::False;
  Pin pin(*this, {&s, &within, &r});
  for (const auto& rel : relations) {
    Bdd shifted = mgr->rename(s, rel.to_next);
    shifted = mgr->and_exists(shifted, rel.relation, rel.next_cube);
    shifted = mgr->apply_and(shifted, within);
    r = mgr->apply_or(r, shifted);
    checkpoint();
  }
  return r;
}

SymbolicSystem::Pin::Pin(SymbolicSystem& sys, std::initializer_list<const Bdd*> handles)
    : sys_(sys), mark_(sys.pinned.size()) {
  sys.pinned.insert(sys.pinned.end(), handles);
}

SymbolicSystem::Pin::~Pin() { sys_.pinned.resize(mark_); }

void SymbolicSystem::checkpoint() {
  if (mgr->num_nodes() * 2 < mgr->node_cap()) return;
  std::vector<Bdd> roots{init, determinism, error, accepting, deadlock, strong_blocking};
  for (const auto& r : relations) roots.insert(roots.end(), {r.relation, r.cur_cube, r.next_cube});
  for (const Bdd* h : pinned) roots.push_back(*h);
  mgr->collect(roots);
}

SymbolicSystem encode_instance(const CompletionInstance& inst, const SymbolicOptions& options) {
  inst.validate();
  SymbolicSystem sys;
  sys.components = inst.processes;
  sys.components.insert(sys.components.end(), inst.environment.begin(), inst.environment.end());
  sys.num_processes = inst.processes.size();
  sys.profile = inst.profile;
  const auto& comps = sys.components;
  const std::size_t n = comps.size();

  std::vector<std::size_t> order = options.component_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  {
    auto check = order;
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < n; ++i)
      if (check.size() != n || check[i] != i)
        throw std::invalid_argument("component order must be a permutation of the components");
  }

  // parameter slots
  struct Slot {
    std::size_t process;
    StateId q;
    Event e;
    std::vector<StateId> targets;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < inst.processes.size(); ++i) {
    const auto& p = inst.processes[i];
    for (StateId q = 0; q < p.num_states(); ++q) {
      const auto out = p.outgoing(q);
      const bool any = !out.empty();
      const bool has_output =
          std::any_of(out.begin(), out.end(), [&](const Transition& t) { return p.has_output(t.event); });
      for (Event e : p.alphabet()) {
        if (std::any_of(out.begin(), out.end(), [&](const Transition& t) { return t.event == e; })) continue;
        // slots no deterministic completion can use
        if (p.has_output(e) ? any : has_output) continue;
        Slot s{i, q, e, {}};
        for (StateId r = 0; r < p.num_states(); ++r)
          if (!inst.is_forbidden(i, {q, e, r})) s.targets.push_back(r);
        if (!s.targets.empty()) slots.push_back(std::move(s));
      }
    }
  }

  unsigned next_var = 0;
  sys.cur_bits.resize(n);
  sys.next_bits.resize(n);
  auto place_params = [&] {
    for (const auto& s : slots) {
      ParamVar pv;
      pv.process = s.process;
      pv.state = s.q;
      pv.event = s.e;
      const unsigned b = std::max(1u, bits_for(comps[s.process].num_states() + 1));
      for (unsigned k = 0; k < b; ++k) {
        pv.bits.push_back(next_var);
        sys.param_vars.push_back(next_var++);
      }
      sys.params.push_back(std::move(pv));
    }
  };
  if (options.params_first) place_params();
  for (std::size_t c : order) {
    const unsigned b = bits_for(comps[c].num_states());
    for (unsigned k = 0; k < b; ++k) {
      sys.cur_bits[c].push_back(next_var++);
      sys.next_bits[c].push_back(next_var++);
    }
    sys.state_vars.insert(sys.state_vars.end(), sys.cur_bits[c].begin(), sys.cur_bits[c].end());
  }
  if (!options.params_first) place_params();
  std::sort(sys.state_vars.begin(), sys.state_vars.end());

  sys.mgr = std::make_unique<BddManager>(next_var, options.node_cap);
  BddManager& m = *sys.mgr;
  const Bdd T = BddManager::True, F = BddManager::False;

  // (process, state, event) -> parameter index
  std::map<std::tuple<std::size_t, StateId, Event>, std::size_t> param_at;
  for (std::size_t k = 0; k < sys.params.size(); ++k)
    param_at[{sys.params[k].process, sys.params[k].state, sys.params[k].event}] = k;
  auto is_none = [&](const ParamVar& p) { return m.value_cube(p.bits, p.none_code()); };

  // domain and determinism
  Bdd det = T;
  for (std::size_t k = 0; k < sys.params.size(); ++k) {
    const auto& p = sys.params[k];
    Bdd dom = is_none(p);
    for (StateId r : slots[k].targets) dom = m.apply_or(dom, m.value_cube(p.bits, r));
    det = m.apply_and(det, dom);
  }
  for (std::size_t k = 0; k < sys.params.size(); ++k) {
    const auto& p = sys.params[k];
    const auto& a = comps[p.process];
    if (!a.has_output(p.event)) continue;
    // an output added at a state with no transitions must be its only one
    Bdd others_none = T;
    for (std::size_t j = 0; j < sys.params.size(); ++j)
      if (j != k && sys.params[j].process == p.process && sys.params[j].state == p.state)
        others_none = m.apply_and(others_none, is_none(sys.params[j]));
    det = m.apply_and(det, m.apply_or(is_none(p), others_none));
  }
  sys.determinism = det;

  auto at = [&](std::size_t c, StateId q) { return m.value_cube(sys.cur_bits[c], q); };
  auto at_next = [&](std::size_t c, StateId q) { return m.value_cube(sys.next_bits[c], q); };
  auto param_of = [&](std::size_t c, StateId q, Event x) -> const ParamVar* {
    if (c >= sys.num_processes) return nullptr;
    auto it = param_at.find({c, q, x});
    return it == param_at.end() ? nullptr : &sys.params[it->second];
  };
  auto has = [&](std::size_t c, StateId q, Event x) {
    for (const auto& t : comps[c].outgoing(q))
      if (t.event == x) return T;
    if (auto* p = param_of(c, q, x)) return m.apply_not(is_none(*p));
    return F;
  };
  auto step = [&](std::size_t c, StateId q, Event x) {
    Bdd r = F;
    for (const auto& t : comps[c].outgoing(q))
      if (t.event == x) r = m.apply_or(r, at_next(c, t.dst));
    if (auto* p = param_of(c, q, x))
      for (StateId dst = 0; dst < comps[c].num_states(); ++dst)
        r = m.apply_or(r, m.apply_and(m.value_cube(p->bits, dst), at_next(c, dst)));
    return r;
  };
  auto ready = [&](std::size_t c, Event x) {
    Bdd r = F;
    for (StateId q = 0; q < comps[c].num_states(); ++q) r = m.apply_or(r, m.apply_and(at(c, q), has(c, q, x)));
    return r;
  };
  auto move = [&](std::size_t c, Event x) {
    Bdd r = F;
    for (StateId q = 0; q < comps[c].num_states(); ++q) r = m.apply_or(r, m.apply_and(at(c, q), step(c, q, x)));
    return r;
  };
  auto output_class = [&](std::size_t c, StateId q) {
    const auto& a = comps[c];
    if (c >= sys.num_processes || !a.outgoing(q).empty())
      return classify_state(a, q) == StateClass::Output ? T : F;
    Bdd r = F;
    for (Event o : a.outputs()) {
      auto* p = param_of(c, q, o);
      if (!p) continue;
      Bdd only = m.apply_not(is_none(*p));
      for (Event e : a.alphabet())
        if (e != o)
          if (auto* other = param_of(c, q, e)) only = m.apply_and(only, is_none(*other));
      r = m.apply_or(r, only);
    }
    return r;
  };

  // initial state, marks
  {
    std::vector<StateId> init;
    for (const auto& a : comps) init.push_back(a.initial());
    sys.init = sys.state_is(init);
  }
  for (std::size_t c = 0; c < n; ++c)
    for (StateId q = 0; q < comps[c].num_states(); ++q) {
      if (comps[c].is_error(q)) {
        sys.error = m.apply_or(sys.error, at(c, q));
        sys.has_error_marks = true;
      }
      if (comps[c].is_accepting(q)) {
        sys.accepting = m.apply_or(sys.accepting, at(c, q));
        sys.has_accepting_marks = true;
      }
    }

  // per-event relations, deadlock and strong blocking
  std::vector<Event> events;
  for (const auto& a : comps)
    for (Event e : a.alphabet()) events.push_back(e);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  Bdd enabled_any = F;
  for (Event x : events) {
    std::optional<std::size_t> sender;
    std::vector<std::size_t> receivers;
    for (std::size_t c = 0; c < n; ++c) {
      if (comps[c].has_output(x)) sender = c;
      if (comps[c].has_input(x)) receivers.push_back(c);
    }
    SymbolicSystem::EventRelation rel;
    rel.event = x;
    rel.participants = receivers;
    if (sender) rel.participants.push_back(*sender);
    std::sort(rel.participants.begin(), rel.participants.end());
    if (rel.participants.empty()) continue;

    Bdd enabled = T;
    rel.relation = T;
    rel.to_cur.assign(next_var, -1);
    rel.to_next.assign(next_var, -1);
    std::vector<unsigned> cur, nxt;
    for (std::size_t c : rel.participants) {
      enabled = m.apply_and(enabled, ready(c, x));
      rel.relation = m.apply_and(rel.relation, move(c, x));
      for (std::size_t b = 0; b < sys.cur_bits[c].size(); ++b) {
        cur.push_back(sys.cur_bits[c][b]);
        nxt.push_back(sys.next_bits[c][b]);
        rel.to_cur[sys.next_bits[c][b]] = static_cast<int>(sys.cur_bits[c][b]);
        rel.to_next[sys.cur_bits[c][b]] = static_cast<int>(sys.next_bits[c][b]);
      }
    }
    rel.cur_cube = m.cube(cur);
    rel.next_cube = m.cube(nxt);
    enabled_any = m.apply_or(enabled_any, enabled);

    if (sender) {
      Bdd waived = F, blocked = F;
      for (std::size_t r : receivers) {
        for (StateId q = 0; q < comps[r].num_states(); ++q)
          waived = m.apply_or(waived, m.apply_and(at(r, q), output_class(r, q)));
        blocked = m.apply_or(blocked, m.apply_not(ready(r, x)));
      }
      const Bdd bad = m.apply_and(ready(*sender, x), m.apply_and(m.apply_not(waived), blocked));
      sys.strong_blocking = m.apply_or(sys.strong_blocking, bad);
    }
    sys.relations.push_back(std::move(rel));
  }
  sys.deadlock = m.apply_not(enabled_any);
  return sys;
}

namespace {

Bdd reachable_counted(SymbolicSystem& sys, std::size_t& iterations) {
  BddManager& m = *sys.mgr;
  Bdd reach = m.apply_and(sys.init, sys.determinism);
  Bdd frontier = reach, next = BddManager::False;
  SymbolicSystem::Pin pin(sys, {&reach, &frontier, &next});
  while (frontier != BddManager::False) {
    ++iterations;
    next = sys.image(frontier);
    frontier = m.apply_diff(next, reach);
    reach = m.apply_or(reach, frontier);
    next = BddManager::False;
    sys.checkpoint();
  }
  return reach;
}

} // namespace

Bdd symbolic_reachable(SymbolicSystem& sys) {
  std::size_t iterations = 0;
  return reachable_counted(sys, iterations);
}

namespace {

// Greatest fixpoint of states with a successor that reaches Z ∩ Q_a.
Bdd accepting_runs(SymbolicSystem& sys, Bdd within) {
  BddManager& m = *sys.mgr;
  Bdd z = within, y = BddManager::False, frontier = BddManager::False, step = BddManager::False;
  SymbolicSystem::Pin pin(sys, {&within, &z, &y, &frontier, &step});
  for (;;) {
    y = m.apply_and(z, sys.accepting);
    frontier = y;
    while (frontier != BddManager::False) {
      step = sys.preimage(frontier, within);
      frontier = m.apply_diff(step, y);
      y = m.apply_or(y, frontier);
      step = BddManager::False;
      sys.checkpoint();
    }
    step = sys.preimage(y, z);
    if (step == z) return z;
    z = step;
    sys.checkpoint();
  }
}

Bdd ag_ef_accepting(SymbolicSystem& sys) {
  BddManager& m = *sys.mgr;
  auto ef = [&](Bdd g) {
    Bdd y = g, frontier = g, step = BddManager::False;
    SymbolicSystem::Pin pin(sys, {&y, &frontier, &step});
    while (frontier != BddManager::False) {
      step = sys.preimage(frontier);
      frontier = m.apply_diff(step, y);
      y = m.apply_or(y, frontier);
      step = BddManager::False;
      sys.checkpoint();
    }
    return y;
  };
  Bdd inner = ef(sys.accepting);
  inner = m.apply_not(inner);
  return m.apply_not(ef(inner));
}

} // namespace

Bdd symbolic_bad_states(SymbolicSystem& sys, Bdd within, bool paper_liveness) {
  BddManager& m = *sys.mgr;
  const auto& prof = sys.profile;
  Bdd bad = BddManager::False;
  SymbolicSystem::Pin pin(sys, {&bad, &within});
  if (prof.check_safety) bad = m.apply_or(bad, sys.error);
  if (prof.check_deadlock) bad = m.apply_or(bad, sys.deadlock);
  if (prof.nonblocking == NonBlocking::Strong) bad = m.apply_or(bad, sys.strong_blocking);
  if (prof.check_liveness && sys.has_accepting_marks) {
    const Bdd live = paper_liveness ? ag_ef_accepting(sys) : accepting_runs(sys, within);
    bad = m.apply_or(bad, live);
  }
  return bad;
}

namespace {

// Valuation of A adding the fewest transitions. Parameter bits of one slot
// are contiguous; bits a path skips are set to 1 so skipped slots read none.
std::vector<std::int8_t> cheapest(const SymbolicSystem& sys, Bdd a) {
  const BddManager& m = *sys.mgr;
  std::vector<int> slot_of(m.num_vars(), -1);
  for (std::size_t k = 0; k < sys.params.size(); ++k)
    for (unsigned v : sys.params[k].bits) slot_of[v] = static_cast<int>(k);
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
  std::map<std::pair<Bdd, bool>, std::pair<std::size_t, int>> memo;  // cost, chosen bit
  auto slot = [&](Bdd x) { return x <= BddManager::True ? -2 : slot_of[m.top_var(x)]; };
  auto cost = [&](auto&& self, Bdd x, bool ones) -> std::size_t {
    if (x == BddManager::False) return inf;
    if (x == BddManager::True) return 0;
    if (auto it = memo.find({x, ones}); it != memo.end()) return it->second.first;
    std::pair<std::size_t, int> best{inf, 1};
    for (int b : {1, 0}) {
      const Bdd child = b ? m.high(x) : m.low(x);
      const bool ones2 = ones && b == 1;
      std::size_t c;
      if (slot(child) != slot(x))
        c = (ones2 || slot(x) < 0 ? 0 : 1) + self(self, child, true);
      else
        c = self(self, child, ones2);
      if (c < best.first) best = {c, b};
    }
    memo[{x, ones}] = best;
    return best.first;
  };
  std::vector<std::int8_t> assignment(m.num_vars(), 1);
  if (cost(cost, a, true) >= inf) throw std::logic_error("no valuation to pick");
  Bdd x = a;
  bool ones = true;
  while (x > BddManager::True) {
    const int b = memo.at({x, ones}).second;
    assignment[m.top_var(x)] = static_cast<std::int8_t>(b);
    const Bdd child = b ? m.high(x) : m.low(x);
    ones = slot(child) != slot(x) ? true : ones && b == 1;
    x = child;
  }
  return assignment;
}

} // namespace

SymbolicResult solve_symbolic(const CompletionInstance& inst, const SymbolicOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SymbolicSystem sys = encode_instance(inst, options);
  BddManager& m = *sys.mgr;
  SymbolicResult result;
  result.stats.state_vars = sys.state_vars.size();
  result.stats.param_vars = sys.param_vars.size();
  result.stats.params = sys.params.size();

  Bdd reach = reachable_counted(sys, result.stats.reach_iterations);
  Bdd bad = BddManager::False;
  SymbolicSystem::Pin pin(sys, {&reach, &bad});
  bad = symbolic_bad_states(sys, reach, options.paper_liveness);
  const Bdd state_cube = m.cube(sys.state_vars);
  const Bdd failing = m.and_exists(reach, bad, state_cube);
  Bdd answers = m.apply_diff(sys.determinism, failing);
  result.stats.answer_nodes = m.dag_size(answers);
  result.stats.answer_count = m.sat_count(answers, sys.param_vars);

  while (answers != BddManager::False) {
    const auto assignment = cheapest(sys, answers);
    Completion c = sys.decode(assignment);
    const auto report = verify_completion(inst, c);
    if (report.passed()) {
      result.completion = std::move(c);
      break;
    }
    const bool weak_only = report.failed(Requirement::NonBlocking) &&
                           inst.profile.nonblocking == NonBlocking::Weak &&
                           !report.failed(Requirement::Deadlock) && !report.failed(Requirement::Safety) &&
                           !report.failed(Requirement::Liveness);
    if (!weak_only && !options.paper_liveness)
      throw std::logic_error("symbolic and explicit verification disagree on a completion");
    if (++result.stats.retries > options.max_retries)
      throw ResourceError("gave up after " + std::to_string(options.max_retries) + " rejected valuations");
    answers = m.apply_diff(answers, sys.valuation_of(c));
  }
  result.stats.bdd_nodes = m.num_nodes();
  result.stats.peak_nodes = m.peak_nodes();
  result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

} // namespace protosynth
