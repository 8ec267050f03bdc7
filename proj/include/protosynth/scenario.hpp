#ifndef PROTOSYNTH_SCENARIO_HPP
#define PROTOSYNTH_SCENARIO_HPP

#include "protosynth/automaton.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace protosynth {

struct LaneItem {
  enum class Kind { Send, Receive, Label };
  Kind kind = Kind::Send;
  Event event;        // Send / Receive
  std::string label;  // Label

  static LaneItem send(Event e) { return {Kind::Send, e, {}}; }
  static LaneItem receive(Event e) { return {Kind::Receive, e, {}}; }
  static LaneItem mark(std::string l) { return {Kind::Label, {}, std::move(l)}; }

  friend bool operator==(const LaneItem&, const LaneItem&) = default;
};

struct Lane {
  std::string process;
  std::vector<LaneItem> items;
  friend bool operator==(const Lane&, const Lane&) = default;
};

/// Event bijection plus a label renaming; labels without an entry are kept.
struct Substitution {
  std::string name;
  std::map<Event, Event> events;
  std::map<std::string, std::string> labels;
};

struct Scenario {
  std::string name;
  std::vector<Lane> lanes;
  std::optional<std::string> symmetric_under;
  /// Lanes start at the process's initial state. Symmetric images do not:
  /// they attach to the rest of the skeleton only through their labels.
  bool starts_at_initial = true;

  const Lane* lane(std::string_view process) const;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::vector<Substitution> substitutions;

  const Substitution* substitution(std::string_view name) const;
};

/// Merge conflicts and substitution misuse.
class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario format:
///
///     subst <name>
///     map <event> <event>        maplabel <label> <label>
///     scenario <name> [symmetric <subst>]
///     lane <process>
///     ! <event>   ? <event>   @ <label>
///
/// Several items may share a line and the marker may be fused with its
/// operand (`!send ?a0'`). Lanes are checked against `interfaces`, matched by
/// automaton name: sends must be outputs, receives inputs. Throws ParseError.
ScenarioSet parse_scenarios(std::string_view text, std::span<const Automaton> interfaces,
                            std::string_view source = "<input>");
std::string format_scenarios(const ScenarioSet& set);

/// Throws ScenarioError if an event of `s` is outside the substitution's domain.
Scenario apply_symmetry(const Scenario& s, const Substitution& sub);

/// History tree of one process: one state per distinct history prefix,
/// together with the labels that follow each history.
struct Skeleton {
  Automaton automaton;
  std::vector<std::vector<std::string>> labels;  // per state, sorted
};

/// Tree over all lanes of `process` in `scenarios`; shared prefixes share
/// states. Lanes of scenarios not starting at the initial state get their own
/// root.
Skeleton build_skeleton(std::span<const Scenario> scenarios, const Automaton& interface);
Skeleton lane_to_skeleton(const Scenario& s, const Automaton& interface);

/// Identifies states followed by the same label, then keeps identifying the
/// targets of equal events leaving one merged state until the result is a
/// quotient with no duplicate event at any state. Throws ScenarioError
/// naming the offending transitions if the quotient is not deterministic, and
/// when some states stay unreachable from the initial state.
Skeleton merge_labels(const Skeleton& s);

struct CompileOptions {
  bool expand_symmetric = true;
};

/// Scenarios plus their symmetric images.
std::vector<Scenario> expand_scenarios(const ScenarioSet& set, const CompileOptions& options = {});

/// One merged incomplete automaton per interface, in interface order.
std::vector<Automaton> compile_scenarios(const ScenarioSet& set, std::span<const Automaton> interfaces,
                                         const CompileOptions& options = {});

/// Guided simulation: true iff the product of `components` has a run whose
/// projection on every lane's process equals the lane (labels ignored).
bool scenario_replayable(const Scenario& s, std::span<const Automaton> components);

} // namespace protosynth

#endif // PROTOSYNTH_SCENARIO_HPP
