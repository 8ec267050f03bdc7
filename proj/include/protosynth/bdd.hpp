#ifndef PROTOSYNTH_BDD_HPP
#define PROTOSYNTH_BDD_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace protosynth {

/// Node index into a BddManager. 0 and 1 are the terminals.
using Bdd = std::uint32_t;

/// Reduced ordered BDD store with hash-consing. Variable i is tested before
/// variable j iff i < j. Nodes are freed only by collect(); exceeding the
/// node cap throws ResourceError.
class BddManager {
public:
  static constexpr Bdd False = 0;
  static constexpr Bdd True = 1;
  static constexpr std::size_t default_node_cap = std::size_t{1} << 22;

  explicit BddManager(unsigned num_vars, std::size_t node_cap = default_node_cap);

  unsigned num_vars() const { return num_vars_; }
  /// Live nodes, terminals included.
  std::size_t num_nodes() const { return nodes_.size() - free_.size(); }
  std::size_t peak_nodes() const { return peak_; }
  std::size_t node_cap() const { return cap_; }

  Bdd var(unsigned v);
  Bdd nvar(unsigned v);
  /// Conjunction of the positive literals of `vars`.
  Bdd cube(std::span<const unsigned> vars);
  /// Conjunction fixing `vars[i]` to bit i of `value`.
  Bdd value_cube(std::span<const unsigned> vars, std::uint64_t value);

  Bdd apply_not(Bdd f);
  Bdd apply_and(Bdd f, Bdd g);
  /// f and not g.
  Bdd apply_diff(Bdd f, Bdd g);
  Bdd apply_or(Bdd f, Bdd g);
  Bdd apply_xor(Bdd f, Bdd g);
  Bdd apply_imp(Bdd f, Bdd g) { return apply_or(apply_not(f), g); }
  Bdd ite(Bdd f, Bdd g, Bdd h);

  /// Quantification over the variables of a positive cube.
  Bdd exists(Bdd f, Bdd cube);
  Bdd forall(Bdd f, Bdd cube);
  /// exists(apply_and(f, g), cube) without building the conjunction.
  Bdd and_exists(Bdd f, Bdd g, Bdd cube);
  /// Substitutes variable v by map[v] (identity where map[v] < 0).
  Bdd rename(Bdd f, std::span<const int> map);

  /// Satisfying assignments over `vars`, which must cover the support of f.
  double sat_count(Bdd f, std::span<const unsigned> vars);
  /// One satisfying assignment (-1 for variables the path does not test).
  std::optional<std::vector<std::int8_t>> pick_one_sat(Bdd f);
  /// Value of f under a total assignment.
  bool eval(Bdd f, std::span<const std::int8_t> assignment) const;
  /// Nodes reachable from f, terminals included.
  std::size_t dag_size(Bdd f) const;

  unsigned top_var(Bdd f) const { return nodes_[f].var; }
  Bdd low(Bdd f) const { return nodes_[f].lo; }
  Bdd high(Bdd f) const { return nodes_[f].hi; }
  bool is_terminal(Bdd f) const { return f <= True; }

  /// Frees every node not reachable from `roots`; other handles become
  /// invalid. Clears the operation cache.
  void collect(std::span<const Bdd> roots);

private:
  struct Node {
    unsigned var;
    Bdd lo, hi;
  };
  struct CacheEntry {
    std::uint32_t op = 0;
    Bdd a = 0, b = 0, c = 0, r = 0;
  };
  enum Op : std::uint32_t { OpNone, OpNot, OpAnd, OpOr, OpXor, OpIte, OpExists, OpAndExists, OpDiff };

  Bdd mk(unsigned v, Bdd lo, Bdd hi);
  void grow_unique();
  std::optional<Bdd> cache_get(std::uint32_t op, Bdd a, Bdd b, Bdd c) const;
  void cache_put(std::uint32_t op, Bdd a, Bdd b, Bdd c, Bdd r);
  Bdd rename_rec(Bdd f, std::span<const int> map, std::unordered_map<Bdd, Bdd>& memo);

  unsigned num_vars_;
  std::size_t cap_;
  std::vector<Node> nodes_;
  std::vector<Bdd> free_;
  std::size_t peak_ = 2;
  std::vector<Bdd> unique_;  // open addressing; 0 marks an empty slot
  std::vector<CacheEntry> cache_;
};

} // namespace protosynth

#endif // PROTOSYNTH_BDD_HPP
