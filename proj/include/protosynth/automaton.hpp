#ifndef PROTOSYNTH_AUTOMATON_HPP
#define PROTOSYNTH_AUTOMATON_HPP

#include "protosynth/event.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace protosynth {

using StateId = std::uint32_t;

/// A labeled edge (src, event, dst). Whether it is an input or an output
/// transition depends on the alphabet of the automaton that owns it.
struct Transition {
  StateId src = 0;
  Event event;
  StateId dst = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend std::strong_ordering operator<=>(const Transition&, const Transition&) = default;
};

enum class StateClass { Deadlock, Input, Output, Mixed };

std::string_view to_string(StateClass c);

/// Finite-state input-output automaton with optional error (safety) and
/// accepting (liveness) markings. States are dense integers; names are kept
/// in a side table.
class Automaton {
public:
  Automaton() = default;
  explicit Automaton(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Adds a state; throws std::invalid_argument if the name is taken.
  StateId add_state(std::string name);
  /// Returns the state called `name`, creating it if needed.
  StateId ensure_state(std::string_view name);
  std::optional<StateId> find_state(std::string_view name) const;
  std::size_t num_states() const { return state_names_.size(); }
  const std::string& state_name(StateId q) const;
  bool has_state(StateId q) const { return q < state_names_.size(); }

  void set_initial(StateId q);
  StateId initial() const { return initial_; }

  void add_input(Event e);
  void add_output(Event e);
  const std::vector<Event>& inputs() const { return inputs_; }
  const std::vector<Event>& outputs() const { return outputs_; }
  bool has_input(Event e) const;
  bool has_output(Event e) const;
  /// I ∪ O, sorted.
  std::vector<Event> alphabet() const;

  /// Returns false when the transition already exists.
  /// Throws std::out_of_range for unknown endpoints.
  bool add_transition(const Transition& t);
  bool add_transition(StateId src, Event e, StateId dst) { return add_transition({src, e, dst}); }
  bool has_transition(const Transition& t) const;
  /// Outgoing transitions of `q`, sorted by (event, dst).
  std::span<const Transition> outgoing(StateId q) const;
  /// All transitions sorted by (src, event, dst).
  std::vector<Transition> transitions() const;
  std::size_t num_transitions() const { return num_transitions_; }

  void mark_error(StateId q);
  void mark_accepting(StateId q);
  bool is_error(StateId q) const { return q < error_.size() && error_[q]; }
  bool is_accepting(StateId q) const { return q < accepting_.size() && accepting_[q]; }
  std::vector<StateId> error_states() const;
  std::vector<StateId> accepting_states() const;

  /// Same states, interface and markings, with `added` unioned into T.
  Automaton completed_with(std::span<const Transition> added) const;

  friend bool operator==(const Automaton&, const Automaton&) = default;

private:
  void check_state(StateId q) const;

  std::string name_;
  std::vector<std::string> state_names_;
  std::unordered_map<std::string, StateId> by_name_;
  StateId initial_ = 0;
  std::vector<Event> inputs_;
  std::vector<Event> outputs_;
  std::vector<std::vector<Transition>> out_;
  std::size_t num_transitions_ = 0;
  std::vector<bool> error_;
  std::vector<bool> accepting_;
};

struct StructuralViolation {
  enum class Kind { NoStates, OverlappingAlphabet, UnknownEvent };
  Kind kind;
  std::string message;
};

/// Empty iff every structural invariant holds.
std::vector<StructuralViolation> validate(const Automaton& a);

/// Every state with several outgoing transitions has only input transitions,
/// all on distinct events.
bool is_deterministic(const Automaton& a);

/// Throws std::out_of_range for an unknown state.
StateClass classify_state(const Automaton& a, StateId q);

inline bool is_closed(const Automaton& a) { return a.inputs().empty(); }

/// Every state has a transition on every input.
bool is_receptive(const Automaton& a);

/// Pairs of transitions at a common state that break determinism.
std::vector<std::pair<Transition, Transition>> determinism_conflicts(const Automaton& a);

} // namespace protosynth

#endif // PROTOSYNTH_AUTOMATON_HPP
