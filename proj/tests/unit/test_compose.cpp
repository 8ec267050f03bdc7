#include "doctest.h"
#include "test_support.hpp"

#include <numeric>

using namespace protosynth;
using namespace testsupport;

TEST_CASE("non-synchronizing output fires alone") {
  auto a1 = make("A", {}, {"x"}, {{"q", "x", "q2"}});
  auto a2 = make("B", {"y"}, {}, {}, {"s"});
  auto p = compose2(a1, a2);
  CHECK(p.num_states() == 2);
  auto succ = p.successors(Product::initial);
  REQUIRE(succ.size() == 1);
  CHECK(succ[0].event == Event::of("x"));
  CHECK(p.global_state(succ[0].dst) == GlobalState{1, 0});
  // y is an external input with no sender: B moves alone
  auto a3 = make("C", {"y"}, {}, {{"s", "y", "s"}});
  auto p2 = compose2(a1, a3);
  CHECK(p2.successors(Product::initial).size() == 2);
  CHECK(p2.inputs() == std::vector<Event>{Event::of("y")});
}

TEST_CASE("interface of the product") {
  auto a = make("A", {"i", "j"}, {"o"}, {});
  auto b = make("B", {"o", "k"}, {"j"}, {});
  auto p = compose2(a, b);
  CHECK(p.inputs() == std::vector<Event>{Event::of("i"), Event::of("k")});
  CHECK(p.outputs() == std::vector<Event>{Event::of("j"), Event::of("o")});
}

TEST_CASE("overlapping outputs are rejected") {
  auto a = make("A", {}, {"x", "z"}, {});
  auto b = make("B", {}, {"x"}, {});
  try {
    compose2(a, b);
    FAIL("expected composition error");
  } catch (const CompositionError& e) {
    CHECK(e.shared_outputs() == std::vector<Event>{Event::of("x")});
    CHECK(std::string(e.what()).find("x") != std::string::npos);
  }
}

TEST_CASE("multicast moves every receiver at once") {
  auto a = make("A", {}, {"x"}, {{"a0", "x", "a1"}});
  auto b = make("B", {"x"}, {}, {{"b0", "x", "b1"}});
  auto c = make("C", {"x"}, {}, {{"c0", "x", "c1"}});
  auto p = compose_all({a, b, c});
  CHECK(p.num_states() == 2);
  auto succ = p.successors(Product::initial);
  REQUIRE(succ.size() == 1);
  CHECK(p.global_state(succ[0].dst) == GlobalState{1, 1, 1});
  auto parts = p.participants(Product::initial, succ[0]);
  CHECK(parts.size() == 3);
  CHECK(sync_enabled(p, Product::initial, Event::of("x")));
  CHECK_FALSE(sync_enabled(p, succ[0].dst, Event::of("x")));

  // one receiver unable blocks the rendezvous
  auto c_blocked = make("C", {"x"}, {}, {}, {"c0"});
  auto p2 = compose_all({a, b, c_blocked});
  CHECK(p2.num_states() == 1);
  CHECK(p2.successors(Product::initial).empty());
  CHECK_FALSE(sync_enabled(p2, Product::initial, Event::of("x")));
  CHECK_THROWS_AS(sync_enabled(p2, Product::initial, Event::of("nobody")), std::invalid_argument);
}

TEST_CASE("singleton product is isomorphic to its component") {
  std::mt19937 rng(5);
  for (int i = 0; i < 30; ++i) {
    auto sys = random_system(rng, 1, 4);
    auto p = compose_all(sys);
    auto q = p.to_automaton();
    // count reachable states by hand
    std::vector<bool> seen(sys[0].num_states());
    std::vector<StateId> stack{sys[0].initial()};
    seen[sys[0].initial()] = true;
    std::size_t n = 0, edges = 0;
    while (!stack.empty()) {
      auto s = stack.back();
      stack.pop_back();
      ++n;
      for (auto& t : sys[0].outgoing(s)) {
        ++edges;
        if (!seen[t.dst]) seen[t.dst] = stack.emplace_back(t.dst), true;
      }
    }
    CHECK(q.num_states() == n);
    CHECK(q.num_transitions() == edges);
  }
}

TEST_CASE("markings are inherited coordinate-wise") {
  std::mt19937 rng(9);
  RandomSpec spec;
  spec.p_error = 0.3;
  spec.p_accepting = 0.3;
  for (int i = 0; i < 40; ++i) {
    auto sys = random_system(rng, 3, 5, spec);
    auto p = compose_all(sys);
    for (GlobalId g = 0; g < p.num_states(); ++g) {
      auto s = p.state(g);
      bool err = false, acc = false;
      for (std::size_t c = 0; c < s.size(); ++c) {
        err = err || sys[c].is_error(s[c]);
        acc = acc || sys[c].is_accepting(s[c]);
      }
      CHECK(p.is_error(g) == err);
      CHECK(p.is_accepting(g) == acc);
    }
  }
}

TEST_CASE("composition is commutative and associative") {
  std::mt19937 rng(21);
  for (int i = 0; i < 60; ++i) {
    auto sys = random_system(rng, 3, 5);
    auto base = compose_all(sys);
    std::vector<std::size_t> id{0, 1, 2};
    auto ref = graph_of(base, id);

    std::vector<std::size_t> perm{2, 0, 1};
    std::vector<Automaton> permuted{sys[2], sys[0], sys[1]};
    // coordinate j of base is coordinate inv[j] of the permuted product
    CHECK(graph_of(compose_all(permuted), {1, 2, 0}) == ref);

    // (A || B) || C through state names
    auto ab = compose2(sys[0], sys[1]).to_automaton("AB");
    auto nested = compose2(ab, sys[2]);
    CHECK(nested.num_states() == base.num_states());
    CHECK(nested.num_transitions() == base.num_transitions());
    for (GlobalId g = 0; g < base.num_states(); ++g) {
      auto s = base.state(g);
      auto inner = ab.find_state("(" + sys[0].state_name(s[0]) + "," + sys[1].state_name(s[1]) + ")");
      REQUIRE(inner);
      auto h = nested.find(std::vector<StateId>{*inner, s[2]});
      REQUIRE(h);
      CHECK(nested.successors(*h).size() == base.successors(g).size());
    }
  }
}

TEST_CASE("monotone in added transitions") {
  std::mt19937 rng(33);
  for (int i = 0; i < 60; ++i) {
    auto sys = random_system(rng, 2, 4);
    auto bigger = sys;
    auto extra = random_system(rng, 1, 0);
    for (int k = 0; k < 3; ++k) {
      auto& a = bigger[rng() % 2];
      auto alpha = a.alphabet();
      if (alpha.empty()) continue;
      a.add_transition(static_cast<StateId>(rng() % a.num_states()), alpha[rng() % alpha.size()],
                       static_cast<StateId>(rng() % a.num_states()));
    }
    auto small = compose_all(sys);
    auto large = compose_all(bigger);
    for (GlobalId g = 0; g < small.num_states(); ++g) {
      auto h = large.find(small.state(g));
      REQUIRE(h);
      for (const auto& e : small.successors(g)) {
        auto d = large.find(small.state(e.dst));
        REQUIRE(d);
        bool found = false;
        for (const auto& f : large.successors(*h)) found = found || (f.event == e.event && f.dst == *d);
        CHECK(found);
      }
    }
  }
}

TEST_CASE("state limit") {
  auto a = make("A", {}, {"x"}, {{"a", "x", "b"}, {"b", "x", "c"}, {"c", "x", "a"}});
  ComposeOptions opt;
  opt.max_states = 2;
  CHECK_THROWS_AS(compose_all({a}, opt), StateLimitError);
  opt.max_states = 3;
  CHECK(compose_all({a}, opt).num_states() == 3);
}

TEST_CASE("product export") {
  auto a = make("A", {}, {"x"}, {{"a", "x", "b"}});
  auto b = make("B", {"x"}, {}, {{"c", "x", "d"}});
  auto p = compose2(a, b);
  CHECK(p.state_label(0) == "(a,c)");
  auto aut = p.to_automaton();
  CHECK(aut.find_state("(b,d)").has_value());
  CHECK(validate(aut).empty());
}
