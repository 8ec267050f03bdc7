#ifndef PROTOSYNTH_VERIFY_HPP
#define PROTOSYNTH_VERIFY_HPP

#include "protosynth/compose.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protosynth {

enum class NonBlocking { None, Weak, Strong };

std::string_view to_string(NonBlocking mode);
/// "none", "weak" or "strong"; throws std::invalid_argument otherwise.
NonBlocking parse_nonblocking(std::string_view text);

struct RequirementProfile {
  bool check_deadlock = true;
  bool check_safety = true;
  bool check_liveness = true;
  NonBlocking nonblocking = NonBlocking::None;

  bool any() const {
    return check_deadlock || check_safety || check_liveness || nonblocking != NonBlocking::None;
  }
  /// Throws std::invalid_argument when no check is enabled.
  void require_nonempty() const;
  std::string describe() const;
};

/// Finite run: states[0] is the start, events[i] leads from states[i] to
/// states[i + 1].
struct Run {
  std::vector<GlobalId> states;
  std::vector<Event> events;

  GlobalId last() const { return states.back(); }
  std::size_t length() const { return events.size(); }
};

/// Ultimately periodic run: `stem` from the initial state to the first state
/// of `cycle`, and `cycle` returning to that state in at least one step.
struct Lasso {
  Run stem;
  Run cycle;
};

enum class Requirement { Deadlock, Safety, Liveness, NonBlocking };
std::string_view to_string(Requirement r);

struct Finding {
  Requirement requirement = Requirement::Deadlock;
  bool passed = true;
  /// Run to the offending state (deadlock, safety, non-blocking).
  std::optional<Run> run;
  /// Accepting lasso (liveness).
  std::optional<Lasso> lasso;
  /// Blocked event (non-blocking).
  std::optional<Event> event;
};

struct VerificationReport {
  std::vector<Finding> findings;

  bool passed() const;
  const Finding* find(Requirement r) const;
  bool failed(Requirement r) const {
    auto* f = find(r);
    return f && !f->passed;
  }
};

struct NonBlockingWitness {
  Run run;
  Event event;
};

enum class LivenessAlgorithm { NestedDfs, Scc };

struct VerifyOptions {
  LivenessAlgorithm liveness = LivenessAlgorithm::NestedDfs;
  /// Skip the remaining checks after the first failure.
  bool stop_at_first_failure = false;
};

/// Global states in breadth-first order from the initial state.
std::vector<GlobalId> reachable(const Product& p);
/// Breadth-first closure of `from`.
std::vector<GlobalId> reachable_from(const Product& p, GlobalId from);

/// Shortest run to a reachable state without successors.
std::optional<Run> find_deadlock(const Product& p);
/// Shortest run to a reachable error state.
std::optional<Run> check_safety(const Product& p);
/// Reachable lasso whose cycle visits an accepting state, if any.
std::optional<Lasso> check_liveness_empty(const Product& p,
                                          LivenessAlgorithm algo = LivenessAlgorithm::NestedDfs);
std::optional<NonBlockingWitness> check_nonblocking(const Product& p, NonBlocking mode);

VerificationReport verify_all(const Product& p, const RequirementProfile& profile,
                              const VerifyOptions& options = {});

/// True iff the run follows product edges starting at the initial state.
bool replay(const Product& p, const Run& run);
bool replay(const Product& p, const Lasso& lasso);

std::string format_run(const Product& p, const Run& run);
std::string format_report(const Product& p, const VerificationReport& report);
/// JSON document: {"passed": bool, "results": [{requirement, verdict, witness...}]}.
std::string report_to_json(const Product& p, const VerificationReport& report);

} // namespace protosynth

#endif // PROTOSYNTH_VERIFY_HPP
