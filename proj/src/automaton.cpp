#include "protosynth/automaton.hpp"

#include <algorithm>
#include <stdexcept>

namespace protosynth {

std::string_view to_string(StateClass c) {
  switch (c) {
    case StateClass::Deadlock: return "deadlock";
    case StateClass::Input: return "input";
    case StateClass::Output: return "output";
    case StateClass::Mixed: return "mixed";
  }
  return "?";
}

namespace {

void insert_sorted(std::vector<Event>& v, Event e) {
  auto it = std::lower_bound(v.begin(), v.end(), e);
  if (it == v.end() || *it != e) v.insert(it, e);
}

bool contains_sorted(const std::vector<Event>& v, Event e) {
  return std::binary_search(v.begin(), v.end(), e);
}

} // namespace

void Automaton::check_state(StateId q) const {
  if (q >= state_names_.size())
    throw std::out_of_range("automaton '" + name_ + "': unknown state id " + std::to_string(q));
}

StateId Automaton::add_state(std::string name) {
  if (by_name_.contains(name))
    throw std::invalid_argument("automaton '" + name_ + "': duplicate state '" + name + "'");
  const auto id = static_cast<StateId>(state_names_.size());
  by_name_.emplace(name, id);
  state_names_.push_back(std::move(name));
  out_.emplace_back();
  error_.push_back(false);
  accepting_.push_back(false);
  return id;
}

StateId Automaton::ensure_state(std::string_view name) {
  if (auto q = find_state(name)) return *q;
  return add_state(std::string(name));
}

std::optional<StateId> Automaton::find_state(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const std::string& Automaton::state_name(StateId q) const {
  check_state(q);
  return state_names_[q];
}

void Automaton::set_initial(StateId q) {
  check_state(q);
  initial_ = q;
}

void Automaton::add_input(Event e) { insert_sorted(inputs_, e); }
void Automaton::add_output(Event e) { insert_sorted(outputs_, e); }
bool Automaton::has_input(Event e) const { return contains_sorted(inputs_, e); }
bool Automaton::has_output(Event e) const { return contains_sorted(outputs_, e); }

std::vector<Event> Automaton::alphabet() const {
  std::vector<Event> all;
  std::set_union(inputs_.begin(), inputs_.end(), outputs_.begin(), outputs_.end(),
                 std::back_inserter(all));
  return all;
}

bool Automaton::add_transition(const Transition& t) {
  check_state(t.src);
  check_state(t.dst);
  auto& edges = out_[t.src];
  auto it = std::lower_bound(edges.begin(), edges.end(), t);
  if (it != edges.end() && *it == t) return false;
  edges.insert(it, t);
  ++num_transitions_;
  return true;
}

bool Automaton::has_transition(const Transition& t) const {
  if (t.src >= out_.size()) return false;
  return std::binary_search(out_[t.src].begin(), out_[t.src].end(), t);
}

std::span<const Transition> Automaton::outgoing(StateId q) const {
  check_state(q);
  return out_[q];
}

std::vector<Transition> Automaton::transitions() const {
  std::vector<Transition> all;
  all.reserve(num_transitions_);
  for (const auto& edges : out_) all.insert(all.end(), edges.begin(), edges.end());
  return all;
}

void Automaton::mark_error(StateId q) {
  check_state(q);
  error_[q] = true;
}

void Automaton::mark_accepting(StateId q) {
  check_state(q);
  accepting_[q] = true;
}

std::vector<StateId> Automaton::error_states() const {
  std::vector<StateId> r;
  for (StateId q = 0; q < error_.size(); ++q)
    if (error_[q]) r.push_back(q);
  return r;
}

std::vector<StateId> Automaton::accepting_states() const {
  std::vector<StateId> r;
  for (StateId q = 0; q < accepting_.size(); ++q)
    if (accepting_[q]) r.push_back(q);
  return r;
}

Automaton Automaton::completed_with(std::span<const Transition> added) const {
  Automaton copy = *this;
  for (const auto& t : added) copy.add_transition(t);
  return copy;
}

std::vector<StructuralViolation> validate(const Automaton& a) {
  std::vector<StructuralViolation> out;
  if (a.num_states() == 0)
    out.push_back({StructuralViolation::Kind::NoStates,
                   "automaton '" + a.name() + "' has no states (initial state undefined)"});
  for (Event e : a.inputs())
    if (a.has_output(e))
      out.push_back({StructuralViolation::Kind::OverlappingAlphabet,
                     "automaton '" + a.name() + "': event '" + e.name() +
                         "' is both an input and an output"});
  for (StateId q = 0; q < a.num_states(); ++q)
    for (const auto& t : a.outgoing(q))
      if (!a.has_input(t.event) && !a.has_output(t.event))
        out.push_back({StructuralViolation::Kind::UnknownEvent,
                       "automaton '" + a.name() + "': transition " + a.state_name(t.src) + " --" +
                           t.event.name() + "--> " + a.state_name(t.dst) +
                           " uses an event outside its interface"});
  return out;
}

std::vector<std::pair<Transition, Transition>> determinism_conflicts(const Automaton& a) {
  std::vector<std::pair<Transition, Transition>> conflicts;
  for (StateId q = 0; q < a.num_states(); ++q) {
    auto edges = a.outgoing(q);
    if (edges.size() < 2) continue;
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const bool both_inputs = a.has_input(edges[i].event) && a.has_input(edges[j].event);
        if (!both_inputs || edges[i].event == edges[j].event)
          conflicts.emplace_back(edges[i], edges[j]);
      }
  }
  return conflicts;
}

bool is_deterministic(const Automaton& a) {
  for (StateId q = 0; q < a.num_states(); ++q) {
    auto edges = a.outgoing(q);
    if (edges.size() < 2) continue;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!a.has_input(edges[i].event)) return false;
      // sorted by event, so duplicates are adjacent
      if (i > 0 && edges[i].event == edges[i - 1].event) return false;
    }
  }
  return true;
}

StateClass classify_state(const Automaton& a, StateId q) {
  auto edges = a.outgoing(q);
  if (edges.empty()) return StateClass::Deadlock;
  const bool all_inputs = std::all_of(edges.begin(), edges.end(),
                                      [&](const Transition& t) { return a.has_input(t.event); });
  if (all_inputs) return StateClass::Input;
  if (edges.size() == 1 && a.has_output(edges.front().event)) return StateClass::Output;
  return StateClass::Mixed;
}

bool is_receptive(const Automaton& a) {
  for (StateId q = 0; q < a.num_states(); ++q) {
    auto edges = a.outgoing(q);
    for (Event x : a.inputs()) {
      const bool found = std::any_of(edges.begin(), edges.end(),
                                     [&](const Transition& t) { return t.event == x; });
      if (!found) return false;
    }
  }
  return true;
}

} // namespace protosynth
