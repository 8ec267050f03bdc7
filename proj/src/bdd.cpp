#include "protosynth/bdd.hpp"

#include "protosynth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace protosynth {

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ull;
  h ^= h >> 33;
  return h;
}

std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(a * 0x9e3779b97f4a7c15ull ^ mix(b + 0x632be59bd9b4e019ull) ^ (c << 17) ^ (c >> 7));
}

constexpr std::size_t max_cache_size = std::size_t{1} << 22;

} // namespace

BddManager::BddManager(unsigned num_vars, std::size_t node_cap)
    : num_vars_(num_vars), cap_(std::max<std::size_t>(node_cap, 2)), cache_(1024) {
  nodes_.push_back({num_vars_, False, False});
  nodes_.push_back({num_vars_, True, True});
  unique_.assign(1024, 0);
}

void BddManager::grow_unique() {
  std::vector<Bdd> bigger(unique_.size() * 2, 0);
  const std::size_t mask = bigger.size() - 1;
  for (Bdd n : unique_) {
    if (n == 0) continue;
    const auto& nd = nodes_[n];
    std::size_t i = hash3(nd.var, nd.lo, nd.hi) & mask;
    while (bigger[i] != 0) i = (i + 1) & mask;
    bigger[i] = n;
  }
  unique_.swap(bigger);
  if (cache_.size() < unique_.size() && cache_.size() < max_cache_size)
    cache_.assign(std::min(unique_.size(), max_cache_size), CacheEntry{});
}

Bdd BddManager::mk(unsigned v, Bdd lo, Bdd hi) {
  if (lo == hi) return lo;
  const std::size_t mask = unique_.size() - 1;
  std::size_t i = hash3(v, lo, hi) & mask;
  while (unique_[i] != 0) {
    const auto& nd = nodes_[unique_[i]];
    if (nd.var == v && nd.lo == lo && nd.hi == hi) return unique_[i];
    i = (i + 1) & mask;
  }
  if (num_nodes() >= cap_)
    throw ResourceError("BDD node cap of " + std::to_string(cap_) + " nodes exceeded");
  Bdd id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[id] = {v, lo, hi};
  } else {
    id = static_cast<Bdd>(nodes_.size());
    nodes_.push_back({v, lo, hi});
  }
  unique_[i] = id;
  peak_ = std::max(peak_, num_nodes());
  if (num_nodes() * 2 > unique_.size()) grow_unique();
  return id;
}

std::optional<Bdd> BddManager::cache_get(std::uint32_t op, Bdd a, Bdd b, Bdd c) const {
  const auto& e = cache_[hash3(op ^ (std::uint64_t{a} << 8), b, c) & (cache_.size() - 1)];
  if (e.op == op && e.a == a && e.b == b && e.c == c) return e.r;
  return std::nullopt;
}

void BddManager::cache_put(std::uint32_t op, Bdd a, Bdd b, Bdd c, Bdd r) {
  cache_[hash3(op ^ (std::uint64_t{a} << 8), b, c) & (cache_.size() - 1)] = {op, a, b, c, r};
}

void BddManager::collect(std::span<const Bdd> roots) {
  std::vector<bool> live(nodes_.size(), false);
  live[False] = live[True] = true;
  std::vector<Bdd> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    const Bdd x = stack.back();
    stack.pop_back();
    if (live[x]) continue;
    live[x] = true;
    stack.push_back(nodes_[x].lo);
    stack.push_back(nodes_[x].hi);
  }
  free_.clear();
  for (Bdd x = static_cast<Bdd>(nodes_.size()); x-- > 2;)
    if (!live[x]) {
      nodes_[x] = {num_vars_, False, False};
      free_.push_back(x);
    }
  std::fill(unique_.begin(), unique_.end(), 0);
  const std::size_t mask = unique_.size() - 1;
  for (Bdd x = 2; x < nodes_.size(); ++x) {
    if (!live[x]) continue;
    std::size_t i = hash3(nodes_[x].var, nodes_[x].lo, nodes_[x].hi) & mask;
    while (unique_[i] != 0) i = (i + 1) & mask;
    unique_[i] = x;
  }
  std::fill(cache_.begin(), cache_.end(), CacheEntry{});
}

Bdd BddManager::var(unsigned v) {
  if (v >= num_vars_) throw std::out_of_range("BDD variable " + std::to_string(v) + " out of range");
  return mk(v, False, True);
}

Bdd BddManager::nvar(unsigned v) {
  if (v >= num_vars_) throw std::out_of_range("BDD variable " + std::to_string(v) + " out of range");
  return mk(v, True, False);
}

Bdd BddManager::cube(std::span<const unsigned> vars) {
  std::vector<unsigned> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  Bdd r = True;
  for (unsigned v : sorted) r = mk(v, False, r);
  return r;
}

Bdd BddManager::value_cube(std::span<const unsigned> vars, std::uint64_t value) {
  Bdd r = True;
  for (std::size_t i = 0; i < vars.size(); ++i)
    r = apply_and(r, (value >> i) & 1u ? var(vars[i]) : nvar(vars[i]));
  return r;
}

Bdd BddManager::apply_not(Bdd f) {
  if (f == False) return True;
  if (f == True) return False;
  if (auto r = cache_get(OpNot, f, 0, 0)) return *r;
  const Node n = nodes_[f];
  const Bdd lo = apply_not(n.lo);
  const Bdd hi = apply_not(n.hi);
  const Bdd r = mk(n.var, lo, hi);
  cache_put(OpNot, f, 0, 0, r);
  return r;
}

Bdd BddManager::apply_and(Bdd f, Bdd g) {
  if (f == False || g == False) return False;
  if (f == True) return g;
  if (g == True || f == g) return f;
  if (f > g) std::swap(f, g);
  if (auto r = cache_get(OpAnd, f, g, 0)) return *r;
  const Node a = nodes_[f], b = nodes_[g];
  const unsigned v = std::min(a.var, b.var);
  const Bdd lo = apply_and(a.var == v ? a.lo : f, b.var == v ? b.lo : g);
  const Bdd hi = apply_and(a.var == v ? a.hi : f, b.var == v ? b.hi : g);
  const Bdd r = mk(v, lo, hi);
  cache_put(OpAnd, f, g, 0, r);
  return r;
}

Bdd BddManager::apply_diff(Bdd f, Bdd g) {
  if (f == False || g == True || f == g) return False;
  if (g == False) return f;
  if (f == True) return apply_not(g);
  if (auto r = cache_get(OpDiff, f, g, 0)) return *r;
  const Node a = nodes_[f], b = nodes_[g];
  const unsigned v = std::min(a.var, b.var);
  const Bdd lo = apply_diff(a.var == v ? a.lo : f, b.var == v ? b.lo : g);
  const Bdd hi = apply_diff(a.var == v ? a.hi : f, b.var == v ? b.hi : g);
  const Bdd r = mk(v, lo, hi);
  cache_put(OpDiff, f, g, 0, r);
  return r;
}

Bdd BddManager::apply_or(Bdd f, Bdd g) {
  if (f == True || g == True) return True;
  if (f == False) return g;
  if (g == False || f == g) return f;
  if (f > g) std::swap(f, g);
  if (auto r = cache_get(OpOr, f, g, 0)) return *r;
  const Node a = nodes_[f], b = nodes_[g];
  const unsigned v = std::min(a.var, b.var);
  const Bdd lo = apply_or(a.var == v ? a.lo : f, b.var == v ? b.lo : g);
  const Bdd hi = apply_or(a.var == v ? a.hi : f, b.var == v ? b.hi : g);
  const Bdd r = mk(v, lo, hi);
  cache_put(OpOr, f, g, 0, r);
  return r;
}

Bdd BddManager::apply_xor(Bdd f, Bdd g) {
  if (f == g) return False;
  if (f == False) return g;
  if (g == False) return f;
  if (f == True) return apply_not(g);
  if (g == True) return apply_not(f);
  if (f > g) std::swap(f, g);
  if (auto r = cache_get(OpXor, f, g, 0)) return *r;
  const Node a = nodes_[f], b = nodes_[g];
  const unsigned v = std::min(a.var, b.var);
  const Bdd lo = apply_xor(a.var == v ? a.lo : f, b.var == v ? b.lo : g);
  const Bdd hi = apply_xor(a.var == v ? a.hi : f, b.var == v ? b.hi : g);
  const Bdd r = mk(v, lo, hi);
  cache_put(OpXor, f, g, 0, r);
  return r;
}

Bdd BddManager::ite(Bdd f, Bdd g, Bdd h) {
  if (f == True) return g;
  if (f == False) return h;
  if (g == h) return g;
  if (g == True && h == False) return f;
  if (g == False && h == True) return apply_not(f);
  if (auto r = cache_get(OpIte, f, g, h)) return *r;
  const Node a = nodes_[f], b = nodes_[g], c = nodes_[h];
  const unsigned v = std::min({a.var, b.var, c.var});
  auto lo_of = [&](const Node& n, Bdd x) { return n.var == v ? n.lo : x; };
  auto hi_of = [&](const Node& n, Bdd x) { return n.var == v ? n.hi : x; };
  const Bdd lo = ite(lo_of(a, f), lo_of(b, g), lo_of(c, h));
  const Bdd hi = ite(hi_of(a, f), hi_of(b, g), hi_of(c, h));
  const Bdd r = mk(v, lo, hi);
  cache_put(OpIte, f, g, h, r);
  return r;
}

Bdd BddManager::exists(Bdd f, Bdd cube) {
  if (f <= True || cube == True) return f;
  const Node n = nodes_[f];
  while (cube != True && nodes_[cube].var < n.var) cube = nodes_[cube].hi;
  if (cube == True) return f;
  if (auto r = cache_get(OpExists, f, cube, 0)) return *r;
  Bdd r;
  if (nodes_[cube].var == n.var) {
    const Bdd rest = nodes_[cube].hi;
    const Bdd lo = exists(n.lo, rest);
    r = lo == True ? True : apply_or(lo, exists(n.hi, rest));
  } else {
    const Bdd lo = exists(n.lo, cube);
    const Bdd hi = exists(n.hi, cube);
    r = mk(n.var, lo, hi);
  }
  cache_put(OpExists, f, cube, 0, r);
  return r;
}

Bdd BddManager::forall(Bdd f, Bdd cube) { return apply_not(exists(apply_not(f), cube)); }

Bdd BddManager::and_exists(Bdd f, Bdd g, Bdd cube) {
  if (f == False || g == False) return False;
  if (f == True && g == True) return True;
  if (f == True) return exists(g, cube);
  if (g == True || f == g) return exists(f, cube);
  if (cube == True) return apply_and(f, g);
  if (f > g) std::swap(f, g);
  const Node a = nodes_[f], b = nodes_[g];
  const unsigned v = std::min(a.var, b.var);
  while (cube != True && nodes_[cube].var < v) cube = nodes_[cube].hi;
  if (cube == True) return apply_and(f, g);
  if (auto r = cache_get(OpAndExists, f, g, cube)) return *r;
  const Bdd flo = a.var == v ? a.lo : f, fhi = a.var == v ? a.hi : f;
  const Bdd glo = b.var == v ? b.lo : g, ghi = b.var == v ? b.hi : g;
  Bdd r;
  if (nodes_[cube].var == v) {
    const Bdd rest = nodes_[cube].hi;
    const Bdd lo = and_exists(flo, glo, rest);
    r = lo == True ? True : apply_or(lo, and_exists(fhi, ghi, rest));
  } else {
    const Bdd lo = and_exists(flo, glo, cube);
    const Bdd hi = and_exists(fhi, ghi, cube);
    r = mk(v, lo, hi);
  }
  cache_put(OpAndExists, f, g, cube, r);
  return r;
}

Bdd BddManager::rename_rec(Bdd f, std::span<const int> map, std::unordered_map<Bdd, Bdd>& memo) {
  if (f <= True) return f;
  if (auto it = memo.find(f); it != memo.end()) return it->second;
  const Node n = nodes_[f];
  const Bdd lo = rename_rec(n.lo, map, memo);
  const Bdd hi = rename_rec(n.hi, map, memo);
  const unsigned v = n.var < map.size() && map[n.var] >= 0 ? static_cast<unsigned>(map[n.var]) : n.var;
  // a plain mk is only valid while the order is preserved
  const bool ordered = (lo <= True || nodes_[lo].var > v) && (hi <= True || nodes_[hi].var > v);
  const Bdd r = ordered ? mk(v, lo, hi) : ite(var(v), hi, lo);
  memo.emplace(f, r);
  return r;
}

Bdd BddManager::rename(Bdd f, std::span<const int> map) {
  std::unordered_map<Bdd, Bdd> memo;
  return rename_rec(f, map, memo);
}

double BddManager::sat_count(Bdd f, std::span<const unsigned> vars) {
  std::vector<unsigned> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end());
  auto pos = [&](Bdd x) -> std::size_t {
    if (x <= True) return sorted.size();
    auto it = std::lower_bound(sorted.begin(), sorted.end(), nodes_[x].var);
    if (it == sorted.end() || *it != nodes_[x].var)
      throw std::invalid_argument("sat_count: support not covered by the variable set");
    return static_cast<std::size_t>(it - sorted.begin());
  };
  std::unordered_map<Bdd, double> memo;
  // count over the variables from pos(x) on
  auto count = [&](auto&& self, Bdd x) -> double {
    if (x == False) return 0.0;
    if (x == True) return 1.0;
    if (auto it = memo.find(x); it != memo.end()) return it->second;
    const std::size_t p = pos(x);
    const Node n = nodes_[x];
    const double lo = self(self, n.lo) * std::ldexp(1.0, static_cast<int>(pos(n.lo) - p - 1));
    const double hi = self(self, n.hi) * std::ldexp(1.0, static_cast<int>(pos(n.hi) - p - 1));
    memo.emplace(x, lo + hi);
    return lo + hi;
  };
  return count(count, f) * std::ldexp(1.0, static_cast<int>(pos(f)));
}

std::optional<std::vector<std::int8_t>> BddManager::pick_one_sat(Bdd f) {
  if (f == False) return std::nullopt;
  std::vector<std::int8_t> a(num_vars_, -1);
  while (f != True) {
    const Node n = nodes_[f];
    if (n.lo != False) {
      a[n.var] = 0;
      f = n.lo;
    } else {
      a[n.var] = 1;
      f = n.hi;
    }
  }
  return a;
}

bool BddManager::eval(Bdd f, std::span<const std::int8_t> assignment) const {
  while (f > True) {
    const Node& n = nodes_[f];
    f = assignment[n.var] > 0 ? n.hi : n.lo;
  }
  return f == True;
}

std::size_t BddManager::dag_size(Bdd f) const {
  std::vector<Bdd> stack{f};
  std::vector<bool> seen(nodes_.size(), false);
  std::size_t count = 0;
  while (!stack.empty()) {
    const Bdd x = stack.back();
    stack.pop_back();
    if (seen[x]) continue;
    seen[x] = true;
    ++count;
    if (x > True) {
      stack.push_back(nodes_[x].lo);
      stack.push_back(nodes_[x].hi);
    }
  }
  return count;
}

} // namespace protosynth
