#ifndef PROTOSYNTH_REDUCTION_HPP
#define PROTOSYNTH_REDUCTION_HPP

#include "protosynth/search.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protosynth {

struct Literal {
  int var = 1;  // 1-based
  bool positive = true;
  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause3 = std::array<Literal, 3>;

struct Cnf3 {
  int num_vars = 0;
  std::vector<Clause3> clauses;

  /// Throws std::invalid_argument on out-of-range variables.
  void validate() const;
  friend bool operator==(const Cnf3&, const Cnf3&) = default;
};

/// Index 0 holds u1.
using Assignment = std::vector<bool>;

bool satisfies(const Cnf3& f, const Assignment& t);

/// DIMACS CNF. Clauses with fewer than three distinct literals are padded by
/// repeating their last literal; longer or empty clauses are parse errors.
Cnf3 parse_dimacs(std::string_view text, std::string_view source = "<input>");
std::string format_dimacs(const Cnf3& f);

/// Process P, environment E and the deadlock-only instance pairing them.
struct ReductionArtifacts {
  Cnf3 formula;
  Automaton process;
  Automaton environment;
  CompletionInstance instance;
  StateId start = 0;                 // q0 of P
  std::vector<Event> challenge;      // xD_k, per variable
  std::vector<StateId> true_state;   // qt_k
  std::vector<StateId> false_state;  // qf_k
};

ReductionArtifacts sat_to_completion(const Cnf3& f);

/// u_k is true iff (q0, xD_k, qt_k) was added; false otherwise. Throws
/// std::logic_error if both choices for a variable were added.
Assignment completion_to_assignment(const ReductionArtifacts& art, const Completion& c);
Completion assignment_to_completion(const ReductionArtifacts& art, const Assignment& t);

/// Exhaustive oracle; throws ResourceError beyond 24 variables.
std::optional<Assignment> brute_force_sat(const Cnf3& f);

} // namespace protosynth

#endif // PROTOSYNTH_REDUCTION_HPP
