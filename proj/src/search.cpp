#include "protosynth/search.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace protosynth {

namespace {

std::string first_violation(const Automaton& a) {
  auto v = validate(a);
  return v.empty() ? std::string() : v.front().message;
}

} // namespace

void CompletionInstance::validate() const {
  if (processes.empty()) throw std::invalid_argument("instance has no process to complete");
  if (!forbidden.empty() && forbidden.size() != processes.size())
    throw std::invalid_argument("forbidden lists must match the processes");
  profile.require_nonempty();
  for (std::size_t i = 0; i < processes.size(); ++i) {
    const auto& p = processes[i];
    if (auto v = first_violation(p); !v.empty()) throw std::invalid_argument(v);
    if (!is_deterministic(p)) throw std::invalid_argument("process '" + p.name() + "' is not deterministic");
    if (!forbidden.empty())
      for (const auto& t : forbidden[i]) {
        if (!p.has_state(t.src) || !p.has_state(t.dst))
          throw std::invalid_argument("forbidden transition of '" + p.name() + "' has unknown states");
        if (p.has_transition(t))
          throw std::invalid_argument("forbidden transition of '" + p.name() + "' is already present");
      }
  }
  for (const auto& e : environment)
    if (auto v = first_violation(e); !v.empty()) throw std::invalid_argument(v);
  std::vector<Automaton> all = processes;
  all.insert(all.end(), environment.begin(), environment.end());
  if (auto shared = overlapping_outputs(all); !shared.empty()) {
    std::string msg = "composition undefined: shared outputs";
    for (Event e : shared) msg += " " + e.name();
    throw CompositionError(msg, std::move(shared));
  }
}

bool CompletionInstance::is_forbidden(std::size_t process, const Transition& t) const {
  if (forbidden.empty()) return false;
  const auto& f = forbidden[process];
  return std::find(f.begin(), f.end(), t) != f.end();
}

std::size_t Completion::size() const {
  std::size_t n = 0;
  for (const auto& a : added) n += a.size();
  return n;
}

Completion empty_completion(const CompletionInstance& inst) {
  return Completion{std::vector<std::vector<Transition>>(inst.processes.size())};
}

std::vector<Automaton> completed_processes(const CompletionInstance& inst, const Completion& c) {
  std::vector<Automaton> out;
  for (std::size_t i = 0; i < inst.processes.size(); ++i)
    out.push_back(i < c.added.size() ? inst.processes[i].completed_with(c.added[i]) : inst.processes[i]);
  return out;
}

Product compose_completion(const CompletionInstance& inst, const Completion& c) {
  auto all = completed_processes(inst, c);
  all.insert(all.end(), inst.environment.begin(), inst.environment.end());
  return compose_all(std::move(all));
}

VerificationReport verify_completion(const CompletionInstance& inst, const Completion& c,
                                     const VerifyOptions& options) {
  return verify_all(compose_completion(inst, c), inst.profile, options);
}

bool is_valid_completion(const CompletionInstance& inst, const Completion& c) {
  if (c.added.size() > inst.processes.size()) return false;
  for (std::size_t i = 0; i < c.added.size(); ++i)
    for (const auto& t : c.added[i]) {
      const auto& p = inst.processes[i];
      if (!p.has_state(t.src) || !p.has_state(t.dst) || p.has_transition(t) || inst.is_forbidden(i, t))
        return false;
      if (!p.has_input(t.event) && !p.has_output(t.event)) return false;
    }
  for (const auto& p : completed_processes(inst, c))
    if (!is_deterministic(p)) return false;
  return true;
}

std::vector<std::vector<Transition>> candidate_transitions(const CompletionInstance& inst) {
  std::vector<std::vector<Transition>> out(inst.processes.size());
  for (std::size_t i = 0; i < inst.processes.size(); ++i) {
    const auto& p = inst.processes[i];
    const auto alpha = p.alphabet();
    for (StateId q = 0; q < p.num_states(); ++q)
      for (Event e : alpha)
        for (StateId r = 0; r < p.num_states(); ++r) {
          Transition t{q, e, r};
          if (!p.has_transition(t) && !inst.is_forbidden(i, t)) out[i].push_back(t);
        }
  }
  return out;
}

int similarity_score(const Automaton& a, const Transition& c) {
  int score = 0;
  const auto from_q = a.outgoing(c.src);
  for (Event e2 : a.alphabet()) {
    if (e2 == c.event) continue;
    bool found = false;
    for (const auto& tq : from_q) {
      if (tq.event != e2) continue;
      for (StateId p = 0; p < a.num_states() && !found; ++p) {
        if (p == c.src) continue;
        const auto out = a.outgoing(p);
        const bool same = std::any_of(out.begin(), out.end(), [&](const Transition& t) {
          return t.event == e2 && t.dst == tq.dst;
        });
        const bool agrees = std::any_of(out.begin(), out.end(), [&](const Transition& t) {
          return t.event == c.event && t.dst == c.dst;
        });
        found = same && agrees;
      }
      if (found) break;
    }
    score += found;
  }
  return score;
}

std::vector<Candidate> rank_candidates(const CompletionInstance& inst, const Completion& current,
                                       std::vector<Candidate> candidates, CandidateOrder order,
                                       std::uint64_t seed) {
  std::sort(candidates.begin(), candidates.end());
  if (order == CandidateOrder::Stable) return candidates;
  if (order == CandidateOrder::Random) {
    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
  }
  const auto procs = completed_processes(inst, current);
  std::vector<std::pair<int, Candidate>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) scored.push_back({similarity_score(procs[c.process], c.t), c});
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < scored.size(); ++i) candidates[i] = scored[i].second;
  return candidates;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Solution: return "solution";
    case Verdict::Pruned: return "pruned";
    case Verdict::Continue: return "continue";
  }
  return "?";
}

std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::Exhausted: return "exhausted";
    case SearchStatus::BudgetExhausted: return "budget-exhausted";
    case SearchStatus::TimedOut: return "timed-out";
  }
  return "?";
}

namespace {

// Whether `t` can join `a` without breaking determinism.
bool can_add(const Automaton& a, const Transition& t) {
  const auto out = a.outgoing(t.src);
  if (out.empty()) return true;
  if (a.has_output(t.event)) return false;
  return std::none_of(out.begin(), out.end(),
                      [&](const Transition& u) { return a.has_output(u.event) || u.event == t.event; });
}

// Some deterministic superset could give process `i` an `x` move at `q`.
bool could_add(const CompletionInstance& inst, std::size_t i, const Automaton& a, StateId q, Event x) {
  if (!can_add(a, {q, x, 0})) return false;
  for (StateId r = 0; r < a.num_states(); ++r)
    if (!inst.is_forbidden(i, {q, x, r})) return true;
  return false;
}

bool has_local(const Automaton& a, StateId q, Event x) {
  for (const auto& t : a.outgoing(q))
    if (t.event == x) return true;
  return false;
}

// A reachable deadlock that no deterministic completion can leave.
bool unfixable_deadlock(const CompletionInstance& inst, const Product& p) {
  const auto comps = p.components();
  const std::size_t nproc = inst.processes.size();
  std::vector<Event> events = p.outputs();
  events.insert(events.end(), p.inputs().begin(), p.inputs().end());
  for (GlobalId g = 0; g < p.num_states(); ++g) {
    if (!p.successors(g).empty()) continue;
    auto s = p.state(g);
    bool fixable = false;
    for (Event x : events) {
      std::vector<std::size_t> parts = p.receivers_of(x);
      if (auto snd = p.sender_of(x)) parts.push_back(*snd);
      if (parts.empty()) continue;
      bool ok = true;
      for (std::size_t c : parts) {
        if (has_local(comps[c], s[c], x)) continue;
        if (c < nproc && could_add(inst, c, comps[c], s[c], x)) continue;
        ok = false;
        break;
      }
      if (ok) {
        fixable = true;
        break;
      }
    }
    if (!fixable) return true;
  }
  return false;
}

enum class NodeOutcome { Solution, Pruned, Unfixable, Continue };

// Source slots a repairing transition must leave from; no value means any.
struct Slot {
  std::size_t process;
  StateId src;
  std::optional<Event> event;
};

struct Evaluation {
  NodeOutcome outcome = NodeOutcome::Continue;
  std::optional<std::vector<Slot>> focus;
};

std::vector<Slot> deadlock_repairs(const CompletionInstance& inst, const Product& p, GlobalId g) {
  const auto comps = p.components();
  const std::size_t nproc = inst.processes.size();
  const auto s = p.state(g);
  std::vector<Event> events = p.outputs();
  events.insert(events.end(), p.inputs().begin(), p.inputs().end());
  std::vector<Slot> slots;
  for (Event x : events) {
    std::vector<std::size_t> parts = p.receivers_of(x);
    if (auto snd = p.sender_of(x)) parts.push_back(*snd);
    std::vector<Slot> missing;
    bool ok = !parts.empty();
    for (std::size_t c : parts) {
      if (has_local(comps[c], s[c], x)) continue;
      if (c < nproc && could_add(inst, c, comps[c], s[c], x)) {
        missing.push_back({c, s[c], x});
        continue;
      }
      ok = false;
      break;
    }
    if (ok) slots.insert(slots.end(), missing.begin(), missing.end());
  }
  return slots;
}

std::vector<Slot> blocking_repairs(const CompletionInstance& inst, const Product& p, GlobalId g, Event x) {
  std::vector<Slot> slots;
  for (std::size_t c : p.receivers_of(x))
    if (c < inst.processes.size()) slots.push_back({c, p.state(g)[c], std::nullopt});
  return slots;
}

Evaluation evaluate(const CompletionInstance& inst, const Completion& c, const SearchOptions& opt) {
  const Product p = compose_completion(inst, c);
  VerifyOptions vo;
  vo.stop_at_first_failure = true;
  const auto rep = verify_all(p, inst.profile, vo);
  if (rep.passed()) return {NodeOutcome::Solution, {}};
  const bool violation = rep.failed(Requirement::Safety) || rep.failed(Requirement::Liveness);
  if (opt.prune && violation) return {NodeOutcome::Pruned, {}};
  if (opt.prune_unfixable_deadlock && unfixable_deadlock(inst, p)) return {NodeOutcome::Unfixable, {}};
  Evaluation ev;
  if (opt.focus_repairs && !violation) {
    if (auto* f = rep.find(Requirement::Deadlock); f && !f->passed)
      ev.focus = deadlock_repairs(inst, p, f->run->states.back());
    else if (auto* f = rep.find(Requirement::NonBlocking);
             f && !f->passed && inst.profile.nonblocking == NonBlocking::Strong)
      ev.focus = blocking_repairs(inst, p, f->run->states.back(), *f->event);
  }
  return ev;
}

bool in_focus(const std::vector<Slot>& focus, const Candidate& c) {
  return std::any_of(focus.begin(), focus.end(), [&](const Slot& s) {
    return s.process == c.process && s.src == c.t.src && (!s.event || *s.event == c.t.event);
  });
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto x : k) h = (h ^ x) * 0x100000001b3ull;
    return static_cast<std::size_t>(h);
  }
};

} // namespace

Verdict classify_node(const CompletionInstance& inst, const Completion& c, const SearchOptions& options) {
  switch (evaluate(inst, c, options).outcome) {
    case NodeOutcome::Solution: return Verdict::Solution;
    case NodeOutcome::Continue: return Verdict::Continue;
    default: return Verdict::Pruned;
  }
}

SearchResult explicit_search(const CompletionInstance& inst, const SearchOptions& options) {
  inst.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<Candidate> all;
  {
    auto per = candidate_transitions(inst);
    for (std::size_t i = 0; i < per.size(); ++i)
      for (const auto& t : per[i]) all.push_back({i, t});
  }
  std::map<Candidate, std::uint32_t> index_of;
  for (std::uint32_t k = 0; k < all.size(); ++k) index_of[all[k]] = k;

  using Key = std::vector<std::uint32_t>;
  auto to_completion = [&](const Key& key) {
    Completion c = empty_completion(inst);
    for (auto k : key) c.added[all[k].process].push_back(all[k].t);
    return c;
  };

  std::mutex mu;
  std::condition_variable cv;
  std::vector<Key> stack{Key{}};
  std::unordered_set<Key, KeyHash> visited;
  if (options.memoize) visited.insert(Key{});
  SearchResult result;
  std::optional<SearchStatus> stop;
  unsigned busy = 0;

  auto worker = [&] {
    std::unique_lock lock(mu);
    while (true) {
      cv.wait(lock, [&] { return stop || !stack.empty() || busy == 0; });
      if (stop || stack.empty()) {
        cv.notify_all();
        return;
      }
      if (result.stats.nodes >= options.budget) {
        stop = SearchStatus::BudgetExhausted;
        continue;
      }
      if (options.time_limit && std::chrono::steady_clock::now() - start > *options.time_limit) {
        stop = SearchStatus::TimedOut;
        continue;
      }
      Key key = std::move(stack.back());
      stack.pop_back();
      ++result.stats.nodes;
      ++result.stats.verified;
      result.stats.max_depth = std::max(result.stats.max_depth, key.size());
      ++busy;
      lock.unlock();

      const Completion c = to_completion(key);
      const Evaluation ev = evaluate(inst, c, options);
      const NodeOutcome outcome = ev.outcome;
      std::vector<Key> children;
      std::size_t rejected = 0;
      if (outcome == NodeOutcome::Continue) {
        const auto procs = completed_processes(inst, c);
        std::vector<Candidate> next;
        std::vector<bool> in_key(all.size(), false);
        for (auto k : key) in_key[k] = true;
        for (std::uint32_t k = 0; k < all.size(); ++k) {
          if (in_key[k] || (ev.focus && !in_focus(*ev.focus, all[k]))) continue;
          if (!can_add(procs[all[k].process], all[k].t)) {
            ++rejected;
            continue;
          }
          next.push_back(all[k]);
        }
        next = rank_candidates(inst, c, std::move(next), options.order, options.seed + key.size());
        // push in reverse so the best candidate is explored first
        for (auto it = next.rbegin(); it != next.rend(); ++it) {
          Key child = key;
          child.insert(std::upper_bound(child.begin(), child.end(), index_of[*it]), index_of[*it]);
          children.push_back(std::move(child));
        }
      }

      lock.lock();
      --busy;
      result.stats.nondeterministic += rejected;
      if (outcome == NodeOutcome::Solution && !stop) {
        stop = SearchStatus::Found;
        result.completion = c;
      } else if (outcome == NodeOutcome::Pruned) {
        ++result.stats.pruned;
      } else if (outcome == NodeOutcome::Unfixable) {
        ++result.stats.pruned;
        ++result.stats.unfixable;
      }
      for (auto& child : children) {
        if (options.memoize && !visited.insert(child).second) {
          ++result.stats.memo_hits;
          continue;
        }
        stack.push_back(std::move(child));
      }
      cv.notify_all();
    }
  };

  const unsigned n = std::max(1u, options.threads);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.status = stop.value_or(SearchStatus::Exhausted);
  if (result.completion)
    for (auto& a : result.completion->added) std::sort(a.begin(), a.end());
  result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

} // namespace protosynth
