#include "protosynth/reduction.hpp"

#include "protosynth/automaton_io.hpp"
#include "protosynth/errors.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace protosynth {

void Cnf3::validate() const {
  if (num_vars < 0) throw std::invalid_argument("negative variable count");
  for (const auto& c : clauses)
    for (const auto& l : c)
      if (l.var < 1 || l.var > num_vars)
        throw std::invalid_argument("literal over unknown variable " + std::to_string(l.var));
}

bool satisfies(const Cnf3& f, const Assignment& t) {
  return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause3& c) {
    return std::any_of(c.begin(), c.end(), [&](const Literal& l) {
      const bool v = static_cast<std::size_t>(l.var - 1) < t.size() && t[l.var - 1];
      return v == l.positive;
    });
  });
}

Cnf3 parse_dimacs(std::string_view text, std::string_view source) {
  const std::string src(source);
  Cnf3 f;
  std::optional<std::size_t> declared_clauses;
  std::vector<Literal> pending;
  std::size_t pending_line = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool done = false;
  auto to_int = [&](const std::string& s, std::size_t line) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v > 1'000'000 || v < -1'000'000)
      throw ParseError(src, line, "expected an integer, got '" + s + "'");
    return static_cast<int>(v);
  };
  while (pos <= text.size() && !done) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    std::istringstream in{std::string(line)};
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    if (tok.empty() || tok[0] == "c" || tok[0][0] == 'c') continue;
    if (tok[0] == "%") break;
    if (tok[0] == "p") {
      if (declared_clauses) throw ParseError(src, lineno, "duplicate problem line");
      if (tok.size() != 4 || tok[1] != "cnf") throw ParseError(src, lineno, "expected 'p cnf <vars> <clauses>'");
      f.num_vars = to_int(tok[2], lineno);
      const int m = to_int(tok[3], lineno);
      if (f.num_vars < 0 || m < 0) throw ParseError(src, lineno, "negative count in problem line");
      declared_clauses = static_cast<std::size_t>(m);
      continue;
    }
    if (!declared_clauses) throw ParseError(src, lineno, "clause before the problem line");
    for (const auto& t : tok) {
      const int v = to_int(t, lineno);
      if (v == 0) {
        std::vector<Literal> lits;
        for (const auto& l : pending)
          if (std::find(lits.begin(), lits.end(), l) == lits.end()) lits.push_back(l);
        if (lits.empty()) throw ParseError(src, lineno, "empty clause");
        if (lits.size() > 3)
          throw ParseError(src, lineno, "clause with " + std::to_string(lits.size()) + " distinct literals");
        while (lits.size() < 3) lits.push_back(lits.back());
        f.clauses.push_back({lits[0], lits[1], lits[2]});
        pending.clear();
        continue;
      }
      if (std::abs(v) > f.num_vars)
        throw ParseError(src, lineno, "variable " + std::to_string(std::abs(v)) + " exceeds the declared count");
      if (pending.empty()) pending_line = lineno;
      pending.push_back({std::abs(v), v > 0});
    }
  }
  if (!declared_clauses) throw ParseError(src, lineno, "missing problem line");
  if (!pending.empty()) throw ParseError(src, pending_line, "clause not terminated by 0");
  if (f.clauses.size() != *declared_clauses)
    throw ParseError(src, lineno,
                     "declared " + std::to_string(*declared_clauses) + " clauses, found " +
                         std::to_string(f.clauses.size()));
  return f;
}

std::string format_dimacs(const Cnf3& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (const auto& l : c) out << (l.positive ? l.var : -l.var) << ' ';
    out << "0\n";
  }
  return out.str();
}

ReductionArtifacts sat_to_completion(const Cnf3& f) {
  f.validate();
  const int n = f.num_vars;
  const int m = static_cast<int>(f.clauses.size());
  auto k = [](const char* stem, int i) { return Event::of(stem + std::to_string(i)); };

  ReductionArtifacts art;
  art.formula = f;
  Automaton& P = art.process = Automaton("P");
  const Event xs = Event::of("xs");
  P.add_input(xs);
  art.start = P.add_state("q0");
  for (int i = 1; i <= n; ++i) {
    P.add_input(k("xD", i));
    P.add_output(k("xt", i));
    P.add_output(k("xf", i));
    art.challenge.push_back(k("xD", i));
    art.true_state.push_back(P.add_state("qt" + std::to_string(i)));
    art.false_state.push_back(P.add_state("qf" + std::to_string(i)));
  }
  for (int i = 1; i <= n; ++i) {
    P.add_transition(art.true_state[i - 1], k("xt", i), art.start);
    P.add_transition(art.false_state[i - 1], k("xf", i), art.start);
  }
  P.add_transition(art.start, xs, art.start);

  Automaton& E = art.environment = Automaton("E");
  E.add_output(xs);
  for (int i = 1; i <= n; ++i) {
    E.add_output(k("xD", i));
    E.add_input(k("xt", i));
    E.add_input(k("xf", i));
  }
  auto name = [](const char* kind, int i, int j) {
    return std::string(kind) + std::to_string(i) + "_" + std::to_string(j);
  };
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= 3; ++i) {
      E.add_state(name("qD", i, j));
      E.add_state(name("qV", i, j));
    }
  const StateId deadlock = E.add_state("deadlock");
  const StateId success = E.add_state("success");
  E.set_initial(m > 0 ? *E.find_state("qD1_1") : success);
  // Rules applied uniformly in j; the satisfying answer moves to the next
  // clause (success after the last), the falsifying one to the next literal
  // (deadlock after the third).
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= 3; ++i) {
      const Literal& z = f.clauses[j - 1][i - 1];
      const StateId ask = *E.find_state(name("qD", i, j));
      const StateId asked = *E.find_state(name("qV", i, j));
      const StateId next_literal = i < 3 ? *E.find_state(name("qD", i + 1, j)) : deadlock;
      const StateId next_clause = j < m ? *E.find_state(name("qD", 1, j + 1)) : success;
      E.add_transition(ask, k("xD", z.var), asked);
      E.add_transition(asked, k("xt", z.var), z.positive ? next_clause : next_literal);
      E.add_transition(asked, k("xf", z.var), z.positive ? next_literal : next_clause);
    }
  E.add_transition(success, xs, success);

  art.instance.environment = {E};
  art.instance.processes = {P};
  art.instance.profile = {true, false, false, NonBlocking::None};
  return art;
}

Assignment completion_to_assignment(const ReductionArtifacts& art, const Completion& c) {
  Assignment t(art.challenge.size(), false);
  if (c.added.empty()) return t;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const bool yes = std::find(c.added[0].begin(), c.added[0].end(),
                               Transition{art.start, art.challenge[k], art.true_state[k]}) != c.added[0].end();
    const bool no = std::find(c.added[0].begin(), c.added[0].end(),
                              Transition{art.start, art.challenge[k], art.false_state[k]}) != c.added[0].end();
    if (yes && no)
      throw std::logic_error("completion assigns both values to u" + std::to_string(k + 1));
    t[k] = yes;
  }
  return t;
}

Completion assignment_to_completion(const ReductionArtifacts& art, const Assignment& t) {
  Completion c = empty_completion(art.instance);
  for (std::size_t k = 0; k < art.challenge.size(); ++k) {
    const bool v = k < t.size() && t[k];
    c.added[0].push_back({art.start, art.challenge[k], v ? art.true_state[k] : art.false_state[k]});
  }
  std::sort(c.added[0].begin(), c.added[0].end());
  return c;
}

std::optional<Assignment> brute_force_sat(const Cnf3& f) {
  f.validate();
  if (f.num_vars > 24) throw ResourceError("brute force is limited to 24 variables");
  const int n = f.num_vars;
  Assignment t(n);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    for (int i = 0; i < n; ++i) t[i] = (bits >> i) & 1u;
    if (satisfies(f, t)) return t;
  }
  return std::nullopt;
}

} // namespace protosynth
