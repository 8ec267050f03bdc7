#ifndef PROTOSYNTH_SYMBOLIC_HPP
#define PROTOSYNTH_SYMBOLIC_HPP

#include "protosynth/bdd.hpp"
#include "protosynth/search.hpp"

#include <initializer_list>
#include <memory>
#include <optional>
#include <vector>

namespace protosynth {

/// Parameter t_{q,e} of process `process`: the target of the e-transition
/// added at q, or none. Encoded over `bits` with the all-ones code for none.
struct ParamVar {
  std::size_t process = 0;
  StateId state = 0;
  Event event;
  std::vector<unsigned> bits;  // least significant first
  std::uint64_t none_code() const { return (std::uint64_t{1} << bits.size()) - 1; }
};

struct SymbolicOptions {
  std::size_t node_cap = BddManager::default_node_cap;
  /// Component positions in the variable order (default: processes, then
  /// environment, as composed).
  std::vector<std::size_t> component_order;
  bool params_first = false;
  /// Use AG EF Q_a for liveness instead of the accepting-cycle fixpoint.
  bool paper_liveness = false;
  /// Re-verification failures tolerated (weak non-blocking) before giving up.
  std::size_t max_retries = 10'000;
};

/// The parametrized product. Components are the processes followed by the
/// environment; each has current/next bit blocks.
struct SymbolicSystem {
  std::unique_ptr<BddManager> mgr;
  std::vector<Automaton> components;
  std::size_t num_processes = 0;
  RequirementProfile profile;
  std::vector<std::vector<unsigned>> cur_bits, next_bits;  // per component
  std::vector<ParamVar> params;
  std::vector<unsigned> state_vars, param_vars;  // cur only / all parameter bits

  Bdd init = BddManager::False;
  /// Domain and determinism constraints on parameters (forbidden included).
  Bdd determinism = BddManager::True;
  /// Per event: participants' joint move (participants' cur/next + params).
  struct EventRelation {
    Event event;
    std::vector<std::size_t> participants;
    Bdd relation;
    Bdd cur_cube, next_cube;          // participants' bits
    std::vector<int> to_cur, to_next;  // rename maps for participants' bits
  };
  std::vector<EventRelation> relations;
  Bdd error = BddManager::False;
  Bdd accepting = BddManager::False;
  Bdd deadlock = BddManager::False;
  Bdd strong_blocking = BddManager::False;
  bool has_error_marks = false;
  bool has_accepting_marks = false;

  Bdd state_is(std::span<const StateId> global);
  /// Parameter valuation describing `c` (slots without an addition are none).
  /// Transitions with no matching parameter make the result False.
  Bdd valuation_of(const Completion& c);
  Completion decode(std::span<const std::int8_t> assignment) const;

  Bdd image(Bdd s);
  /// Predecessors of s, intersected with `within`.
  Bdd preimage(Bdd s, Bdd within = BddManager::True);

  /// Handles that survive collection while the guard lives.
  class Pin {
  public:
    Pin(SymbolicSystem& sys, std::initializer_list<const Bdd*> handles);
    ~Pin();
    Pin(const Pin&) = delete;
    Pin& operator=(const Pin&) = delete;

  private:
    SymbolicSystem& sys_;
    std::size_t mark_;
  };

  /// Garbage-collects when the store is more than half full, keeping the
  /// system's own predicates and every pinned handle alive.
  void checkpoint();

  std::vector<const Bdd*> pinned;
};

SymbolicSystem encode_instance(const CompletionInstance& inst, const SymbolicOptions& options = {});

/// Least fixpoint of the image from the initial state, over cur + params.
Bdd symbolic_reachable(SymbolicSystem& sys);

/// Bad states per the profile: error, deadlock, strong blocking and states
/// with an accepting run. `within` bounds the liveness fixpoint (pass the
/// reachable set; True for no bound).
Bdd symbolic_bad_states(SymbolicSystem& sys, Bdd within, bool paper_liveness = false);

struct SymbolicStats {
  std::size_t state_vars = 0;
  std::size_t param_vars = 0;
  std::size_t params = 0;
  std::size_t reach_iterations = 0;
  std::size_t bdd_nodes = 0;
  std::size_t peak_nodes = 0;
  std::size_t answer_nodes = 0;
  double answer_count = 0;  // valid parameter valuations
  std::size_t retries = 0;
  double seconds = 0;
};

struct SymbolicResult {
  std::optional<Completion> completion;
  SymbolicStats stats;
};

/// Picks a valid valuation with the fewest added transitions, decodes it
/// and re-verifies it explicitly. Throws ResourceError on node-cap overflow
/// or when `max_retries` re-verifications fail.
SymbolicResult solve_symbolic(const CompletionInstance& inst, const SymbolicOptions& options = {});

} // namespace protosynth

#endif // PROTOSYNTH_SYMBOLIC_HPP
