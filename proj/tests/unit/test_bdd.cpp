#include "doctest.h"

#include "protosynth/bdd.hpp"
#include "protosynth/errors.hpp"

#include <map>
#include <random>
#include <vector>

using namespace protosynth;

namespace {

constexpr unsigned K = 5;  // variables in randomized tests
using Table = std::uint32_t;  // bit a = value under assignment a (var v = bit v of a)

Table var_table(unsigned v) {
  Table t = 0;
  for (unsigned a = 0; a < (1u << K); ++a)
    if ((a >> v) & 1u) t |= Table{1} << a;
  return t;
}

std::vector<std::int8_t> assignment_of(unsigned a) {
  std::vector<std::int8_t> r(K);
  for (unsigned v = 0; v < K; ++v) r[v] = static_cast<std::int8_t>((a >> v) & 1u);
  return r;
}

Table table_of(const BddManager& m, Bdd f) {
  Table t = 0;
  for (unsigned a = 0; a < (1u << K); ++a)
    if (m.eval(f, assignment_of(a))) t |= Table{1} << a;
  return t;
}

struct Expr {
  Bdd bdd;
  Table table;
};

Expr random_expr(BddManager& m, std::mt19937& rng, int depth) {
  if (depth == 0 || rng() % 4 == 0) {
    const unsigned v = rng() % K;
    return {m.var(v), var_table(v)};
  }
  const auto a = random_expr(m, rng, depth - 1);
  switch (rng() % 6) {
    case 0: return {m.apply_not(a.bdd), ~a.table};
    case 1: {
      const auto b = random_expr(m, rng, depth - 1);
      return {m.apply_and(a.bdd, b.bdd), a.table & b.table};
    }
    case 2: {
      const auto b = random_expr(m, rng, depth - 1);
      return {m.apply_or(a.bdd, b.bdd), a.table | b.table};
    }
    case 3: {
      const auto b = random_expr(m, rng, depth - 1);
      return {m.apply_xor(a.bdd, b.bdd), a.table ^ b.table};
    }
    case 4: {
      const auto b = random_expr(m, rng, depth - 1);
      return {m.apply_diff(a.bdd, b.bdd), a.table & ~b.table};
    }
    default: {
      const auto b = random_expr(m, rng, depth - 1);
      const auto c = random_expr(m, rng, depth - 1);
      return {m.ite(a.bdd, b.bdd, c.bdd), (a.table & b.table) | (~a.table & c.table)};
    }
  }
}

Table exists_table(Table t, unsigned v) {
  Table r = 0;
  for (unsigned a = 0; a < (1u << K); ++a)
    if (((t >> a) & 1u) || ((t >> (a ^ (1u << v))) & 1u)) r |= Table{1} << a;
  return r;
}

} // namespace

TEST_CASE("basic identities") {
  BddManager m(3);
  const Bdd x = m.var(0), y = m.var(1), z = m.var(2);
  CHECK(m.apply_and(x, m.apply_not(x)) == BddManager::False);
  CHECK(m.apply_or(x, m.apply_not(x)) == BddManager::True);
  CHECK(m.exists(m.apply_and(x, y), m.cube(std::vector<unsigned>{0})) == y);
  CHECK(m.forall(m.apply_or(x, y), m.cube(std::vector<unsigned>{0})) == y);
  const std::vector<unsigned> all{0, 1, 2};
  CHECK(m.sat_count(m.apply_or(x, y), all) == doctest::Approx(6));
  CHECK(m.sat_count(BddManager::True, all) == doctest::Approx(8));
  CHECK(m.sat_count(BddManager::False, all) == doctest::Approx(0));
  CHECK(m.nvar(2) == m.apply_not(z));
  CHECK(m.apply_imp(x, x) == BddManager::True);
  CHECK(m.top_var(m.apply_and(y, z)) == 1);
  CHECK(m.dag_size(m.apply_and(x, m.apply_and(y, z))) == 5);  // terminals included
  CHECK_THROWS_AS(m.var(3), std::out_of_range);
}

TEST_CASE("value cubes are little-endian") {
  BddManager m(4);
  const std::vector<unsigned> vars{1, 3};
  const Bdd c = m.value_cube(vars, 2);  // var1 = 0, var3 = 1
  CHECK(c == m.apply_and(m.nvar(1), m.var(3)));
  CHECK(m.value_cube(vars, 3) == m.cube(vars));
}

TEST_CASE("random expressions match truth tables and are canonical") {
  std::mt19937 rng(11);
  BddManager m(K);
  std::map<Table, Bdd> seen;
  for (int i = 0; i < 3000; ++i) {
    const auto e = random_expr(m, rng, 5);
    REQUIRE(table_of(m, e.bdd) == e.table);
    auto [it, fresh] = seen.emplace(e.table, e.bdd);
    CHECK(it->second == e.bdd);
  }
  CHECK(seen.size() > 200);
}

TEST_CASE("quantifiers, relational product and counting match truth tables") {
  std::mt19937 rng(12);
  BddManager m(K);
  std::vector<unsigned> all(K);
  for (unsigned v = 0; v < K; ++v) all[v] = v;
  for (int i = 0; i < 500; ++i) {
    const auto f = random_expr(m, rng, 4);
    const auto g = random_expr(m, rng, 4);
    std::vector<unsigned> qs;
    for (unsigned v = 0; v < K; ++v)
      if (rng() % 3 == 0) qs.push_back(v);
    Table ex = f.table, fa = f.table, rp = f.table & g.table;
    for (unsigned v : qs) {
      ex = exists_table(ex, v);
      fa = ~exists_table(~fa, v);
      rp = exists_table(rp, v);
    }
    const Bdd cube = m.cube(qs);
    CHECK(table_of(m, m.exists(f.bdd, cube)) == ex);
    CHECK(table_of(m, m.forall(f.bdd, cube)) == fa);
    CHECK(m.and_exists(f.bdd, g.bdd, cube) == m.exists(m.apply_and(f.bdd, g.bdd), cube));
    CHECK(table_of(m, m.and_exists(f.bdd, g.bdd, cube)) == rp);
    CHECK(m.sat_count(f.bdd, all) == doctest::Approx(std::popcount(f.table)));
    const auto pick = m.pick_one_sat(f.bdd);
    CHECK(pick.has_value() == (f.table != 0));
    if (pick) {
      auto a = *pick;
      for (auto& b : a) b = b < 0 ? 0 : b;
      CHECK(m.eval(f.bdd, a));
    }
  }
}

TEST_CASE("rename handles order-preserving and reordering maps") {
  std::mt19937 rng(13);
  BddManager m(K);
  for (int i = 0; i < 300; ++i) {
    const auto f = random_expr(m, rng, 4);
    std::vector<int> perm(K);
    for (unsigned v = 0; v < K; ++v) perm[v] = static_cast<int>(v);
    std::shuffle(perm.begin(), perm.end(), rng);
    Table expect = 0;
    for (unsigned a = 0; a < (1u << K); ++a) {
      unsigned src = 0;  // f is evaluated on variable v = value of perm[v]
      for (unsigned v = 0; v < K; ++v)
        if ((a >> perm[v]) & 1u) src |= 1u << v;
      if ((f.table >> src) & 1u) expect |= Table{1} << a;
    }
    CHECK(table_of(m, m.rename(f.bdd, perm)) == expect);
  }
  // shift x0 -> x1 keeps order when x1 is absent
  const Bdd x0 = m.var(0), x2 = m.var(2);
  const std::vector<int> shift{1, -1, -1, -1, -1};
  CHECK(m.rename(m.apply_and(x0, x2), shift) == m.apply_and(m.var(1), x2));
}

TEST_CASE("collection keeps roots intact and frees the rest") {
  std::mt19937 rng(14);
  BddManager m(K);
  std::vector<Expr> kept;
  for (int i = 0; i < 50; ++i) {
    auto e = random_expr(m, rng, 5);
    if (i % 5 == 0) kept.push_back(e);
  }
  const std::size_t before = m.num_nodes();
  std::vector<Bdd> roots;
  for (const auto& e : kept) roots.push_back(e.bdd);
  m.collect(roots);
  CHECK(m.num_nodes() <= before);
  for (const auto& e : kept) CHECK(table_of(m, e.bdd) == e.table);
  // rebuilding a kept function finds the surviving nodes
  std::map<Table, Bdd> by_table;
  for (const auto& e : kept) by_table[e.table] = e.bdd;
  for (int i = 0; i < 2000; ++i) {
    const auto e = random_expr(m, rng, 5);
    REQUIRE(table_of(m, e.bdd) == e.table);
    if (auto it = by_table.find(e.table); it != by_table.end()) CHECK(it->second == e.bdd);
  }
  m.collect({});
  CHECK(m.num_nodes() == 2);
  CHECK(m.peak_nodes() >= before);
}

TEST_CASE("node cap raises a resource error") {
  BddManager m(20, 64);
  Bdd f = BddManager::False;
  auto grow = [&] {
    for (unsigned v = 0; v + 1 < 20; ++v) f = m.apply_xor(f, m.apply_and(m.var(v), m.var(v + 1)));
  };
  CHECK_THROWS_AS(grow(), ResourceError);
}
