#ifndef PROTOSYNTH_COMPOSE_HPP
#define PROTOSYNTH_COMPOSE_HPP

#include "protosynth/automaton.hpp"
#include "protosynth/errors.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace protosynth {

/// Raised when two components share an output event.
class CompositionError : public std::runtime_error {
public:
  CompositionError(const std::string& msg, std::vector<Event> shared)
      : std::runtime_error(msg), shared_(std::move(shared)) {}
  const std::vector<Event>& shared_outputs() const { return shared_; }

private:
  std::vector<Event> shared_;
};

/// Raised when exploration exceeds a configured state bound.
class StateLimitError : public ResourceError {
public:
  using ResourceError::ResourceError;
};

using GlobalState = std::vector<StateId>;
using GlobalId = std::uint32_t;

struct ComposeOptions {
  std::size_t max_states = std::numeric_limits<std::size_t>::max();
};

/// Reachable part of the rendezvous product of n components. Global state 0
/// is the initial state; every stored state is reachable from it.
class Product {
public:
  struct Edge {
    Event event;
    GlobalId dst;
  };

  static constexpr GlobalId initial = 0;

  std::span<const Automaton> components() const { return components_; }
  std::size_t num_components() const { return components_.size(); }
  std::size_t num_states() const { return error_.size(); }
  std::size_t num_transitions() const { return edges_.size(); }

  std::span<const StateId> state(GlobalId g) const {
    return {storage_.data() + static_cast<std::size_t>(g) * components_.size(), components_.size()};
  }
  GlobalState global_state(GlobalId g) const {
    auto s = state(g);
    return {s.begin(), s.end()};
  }
  std::optional<GlobalId> find(std::span<const StateId> s) const;

  std::span<const Edge> successors(GlobalId g) const {
    return {edges_.data() + offsets_[g], edges_.data() + offsets_[g + 1]};
  }

  bool is_error(GlobalId g) const { return error_[g]; }
  bool is_accepting(GlobalId g) const { return accepting_[g]; }
  bool has_error_marks() const { return has_error_marks_; }
  bool has_accepting_marks() const { return has_accepting_marks_; }

  /// (∪ inputs) \ (∪ outputs) and ∪ outputs, sorted.
  const std::vector<Event>& inputs() const { return inputs_; }
  const std::vector<Event>& outputs() const { return outputs_; }

  /// Component emitting `x`, if any.
  std::optional<std::size_t> sender_of(Event x) const;
  /// Components listing `x` as an input.
  std::vector<std::size_t> receivers_of(Event x) const;

  /// Component transitions that jointly realize edge `e` leaving `src`.
  std::vector<std::pair<std::size_t, Transition>> participants(GlobalId src, const Edge& e) const;

  /// "(q1,q2,...)" built from component state names.
  std::string state_label(GlobalId g) const;

  /// The product as a plain automaton (states named by `state_label`).
  Automaton to_automaton(std::string name = "product") const;

private:
  friend Product compose_all(std::vector<Automaton> components, const ComposeOptions& options);

  std::vector<Automaton> components_;
  std::vector<StateId> storage_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Edge> edges_;
  std::vector<bool> error_;
  std::vector<bool> accepting_;
  bool has_error_marks_ = false;
  bool has_accepting_marks_ = false;
  std::vector<Event> inputs_;
  std::vector<Event> outputs_;
  // sorted union alphabet with per-event roles
  std::vector<Event> alphabet_;
  std::vector<int> sender_;
  std::vector<std::vector<std::size_t>> receivers_;
  // open-addressing index over storage_
  std::vector<GlobalId> slots_;
};

/// n-ary product over the ordered component list. Throws CompositionError if
/// outputs overlap and StateLimitError past `options.max_states`.
Product compose_all(std::vector<Automaton> components, const ComposeOptions& options = {});

inline Product compose2(const Automaton& a1, const Automaton& a2) {
  return compose_all({a1, a2});
}

/// Shared outputs between any two of `components` (empty iff composable).
std::vector<Event> overlapping_outputs(std::span<const Automaton> components);

/// True iff the unique sender of `x` can emit it at `g` and every component
/// with `x` as an input can receive it there. Throws std::invalid_argument if
/// no component outputs `x`.
bool sync_enabled(const Product& p, GlobalId g, Event x);

} // namespace protosynth

#endif // PROTOSYNTH_COMPOSE_HPP
