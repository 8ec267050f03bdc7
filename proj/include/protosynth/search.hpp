#ifndef PROTOSYNTH_SEARCH_HPP
#define PROTOSYNTH_SEARCH_HPP

#include "protosynth/verify.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace protosynth {

/// Problem instance: fixed environment automata (monitors included),
/// deterministic process automata to complete, and per-process forbidden
/// transitions.
struct CompletionInstance {
  std::vector<Automaton> environment;
  std::vector<Automaton> processes;
  std::vector<std::vector<Transition>> forbidden;  // empty or one list per process
  RequirementProfile profile;

  /// Throws std::invalid_argument (or CompositionError) when the instance is
  /// malformed: no processes, non-deterministic processes, overlapping
  /// outputs, forbidden transitions that already exist, empty profile.
  void validate() const;
  bool is_forbidden(std::size_t process, const Transition& t) const;
};

/// Transitions added to each process.
struct Completion {
  std::vector<std::vector<Transition>> added;

  std::size_t size() const;
  friend bool operator==(const Completion&, const Completion&) = default;
};

Completion empty_completion(const CompletionInstance& inst);
std::vector<Automaton> completed_processes(const CompletionInstance& inst, const Completion& c);
/// Processes (completed) followed by the environment.
Product compose_completion(const CompletionInstance& inst, const Completion& c);
VerificationReport verify_completion(const CompletionInstance& inst, const Completion& c,
                                     const VerifyOptions& options = {});
/// True iff every completed process is deterministic and nothing forbidden
/// or already present was added.
bool is_valid_completion(const CompletionInstance& inst, const Completion& c);

struct Candidate {
  std::size_t process = 0;
  Transition t;
  friend bool operator==(const Candidate&, const Candidate&) = default;
  friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

/// Per process, every (q, e, q') over Q x (I u O) x Q that is neither present
/// nor forbidden, in (src, event, dst) order.
std::vector<std::vector<Transition>> candidate_transitions(const CompletionInstance& inst);

/// Number of events e'' != e for which some state p has p -e''-> r and
/// q -e''-> r, and p -e-> q', all measured in `process` (which should
/// already include the current additions).
int similarity_score(const Automaton& process, const Transition& candidate);

enum class CandidateOrder { Ranked, Stable, Random };

/// Orders by descending similarity score (against the processes completed
/// with `current`), ties by (process, src, event, dst). `Random` shuffles
/// with `seed` before the stable sort, so it only permutes ties; `Stable`
/// keeps index order.
std::vector<Candidate> rank_candidates(const CompletionInstance& inst, const Completion& current,
                                       std::vector<Candidate> candidates,
                                       CandidateOrder order = CandidateOrder::Ranked, std::uint64_t seed = 0);

enum class Verdict { Solution, Pruned, Continue };
std::string_view to_string(Verdict v);

enum class SearchStatus { Found, Exhausted, BudgetExhausted, TimedOut };
std::string_view to_string(SearchStatus s);

struct SearchOptions {
  std::size_t budget = 1'000'000;  // nodes
  std::optional<std::chrono::milliseconds> time_limit;
  CandidateOrder order = CandidateOrder::Ranked;
  std::uint64_t seed = 0;
  bool memoize = true;
  /// Prune on safety and liveness failures.
  bool prune = true;
  /// Also prune nodes with a reachable deadlock that no deterministic
  /// superset can leave.
  bool prune_unfixable_deadlock = true;
  /// Only branch on transitions that could repair the reported deadlock or
  /// strong blocking state; every solution above the node contains one.
  bool focus_repairs = true;
  unsigned threads = 1;
};

struct SearchStats {
  std::size_t nodes = 0;          // popped from the stack
  std::size_t verified = 0;       // composed and model checked
  std::size_t nondeterministic = 0;
  std::size_t pruned = 0;
  std::size_t unfixable = 0;
  std::size_t memo_hits = 0;
  std::size_t max_depth = 0;
  double seconds = 0;
};

struct SearchResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::optional<Completion> completion;
  SearchStats stats;
};

/// Depth-first search over sets of added transitions, starting from the
/// empty set; children add one candidate. Returns the first node whose
/// completion passes the whole profile.
SearchResult explicit_search(const CompletionInstance& inst, const SearchOptions& options = {});

/// Verdict of a single node (exposed for tests).
Verdict classify_node(const CompletionInstance& inst, const Completion& c, const SearchOptions& options);

} // namespace protosynth

#endif // PROTOSYNTH_SEARCH_HPP
