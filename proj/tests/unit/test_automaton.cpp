#include "doctest.h"
#include "test_support.hpp"

#include <sstream>

using namespace protosynth;
using testsupport::make;

TEST_CASE("event interning") {
  CHECK(Event::of("p0") == Event::of("p0"));
  CHECK(Event::of("p0") != Event::of("p1"));
  CHECK(Event::of("a1'").name() == "a1'");
  CHECK(Event::of("a") < Event::of("b"));
  CHECK_THROWS_AS(Event::of(""), std::invalid_argument);
}

TEST_CASE("validate reports structural violations") {
  auto ok = make("ok", {"x"}, {"y"}, {{"a", "x", "b"}, {"b", "y", "a"}});
  CHECK(validate(ok).empty());

  Automaton bad = ok;
  bad.add_transition(0, Event::of("z"), 1);
  auto v = validate(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == StructuralViolation::Kind::UnknownEvent);
  CHECK(v[0].message.find("z") != std::string::npos);

  Automaton overlap = ok;
  overlap.add_output(Event::of("x"));
  v = validate(overlap);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == StructuralViolation::Kind::OverlappingAlphabet);
  CHECK(v[0].message.find("'x'") != std::string::npos);

  CHECK(validate(Automaton("empty")).size() == 1);
}

TEST_CASE("determinism and state classes") {
  auto single = make("one", {}, {}, {});
  CHECK(is_deterministic(single));
  CHECK(classify_state(single, 0) == StateClass::Deadlock);

  auto two_out = make("o", {}, {"x", "y"}, {{"a", "x", "a"}, {"a", "y", "a"}});
  CHECK_FALSE(is_deterministic(two_out));
  CHECK(classify_state(two_out, 0) == StateClass::Mixed);

  auto inputs = make("i", {"x", "y"}, {"z"}, {{"a", "x", "b"}, {"a", "y", "a"}, {"b", "z", "a"}});
  CHECK(is_deterministic(inputs));
  CHECK(classify_state(inputs, 0) == StateClass::Input);
  CHECK(classify_state(inputs, 1) == StateClass::Output);

  auto dup = make("d", {"x"}, {}, {{"a", "x", "a"}, {"a", "x", "b"}});
  CHECK_FALSE(is_deterministic(dup));
  CHECK(determinism_conflicts(dup).size() == 1);

  CHECK_THROWS_AS(classify_state(single, 7), std::out_of_range);
}

TEST_CASE("deterministic implies no mixed states") {
  std::mt19937 rng(11);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    auto sys = testsupport::random_system(rng, 1, 4);
    const auto& a = sys[0];
    if (!is_deterministic(a)) continue;
    ++checked;
    for (StateId q = 0; q < a.num_states(); ++q) CHECK(classify_state(a, q) != StateClass::Mixed);
  }
  CHECK(checked > 20);
}

TEST_CASE("closed and receptive") {
  auto closed = make("c", {}, {"x"}, {{"a", "x", "a"}});
  CHECK(is_closed(closed));
  CHECK(is_receptive(closed));

  auto r = make("r", {"x"}, {}, {{"a", "x", "b"}, {"b", "x", "a"}});
  CHECK(is_receptive(r));
  CHECK_FALSE(is_closed(r));
  Automaton nr = make("nr", {"x", "y"}, {}, {{"a", "x", "a"}});
  CHECK_FALSE(is_receptive(nr));
}

TEST_CASE("adding transitions keeps the interface") {
  auto a = make("a", {"x"}, {"y"}, {{"s", "x", "t"}});
  a.mark_error(1);
  auto c = a.completed_with(std::vector<Transition>{{1, Event::of("y"), 0}});
  CHECK(c.inputs() == a.inputs());
  CHECK(c.outputs() == a.outputs());
  CHECK(c.num_states() == a.num_states());
  CHECK(c.initial() == a.initial());
  CHECK(c.error_states() == a.error_states());
  CHECK(c.num_transitions() == 2);
}

TEST_CASE("text format round trip") {
  const char* text = R"(# comment
automaton Chan
inputs p0 p1
outputs p0' p1'
states empty h0 h1
initial empty
error h1
accepting h0
trans empty p0 h0   # trailing comment
trans h0 p0' empty
trans empty p1 h1
)";
  auto a = parse_automaton(text, "chan.aut");
  CHECK(a.name() == "Chan");
  CHECK(a.num_states() == 3);
  CHECK(a.num_transitions() == 3);
  CHECK(a.is_error(2));
  CHECK(a.is_accepting(1));
  auto again = parse_automaton(format_automaton(a));
  CHECK(again == a);
  CHECK(is_deterministic(again) == is_deterministic(a));
  CHECK(validate(again).empty());

  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) {
    testsupport::RandomSpec spec;
    spec.p_error = 0.3;
    spec.p_accepting = 0.3;
    auto sys = testsupport::random_system(rng, 2, 5, spec);
    for (const auto& s : sys) CHECK(parse_automaton(format_automaton(s)) == s);
  }
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_automata("automaton A\ninputs x\ntrans a x\n", "f.aut");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("f.aut:3:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_automata("inputs x\n"), ParseError);
  CHECK_THROWS_AS(parse_automata("automaton A\nbogus q\n"), ParseError);
  CHECK_THROWS_AS(parse_automaton("automaton A\nautomaton B\n"), ParseError);
}

TEST_CASE("dot export") {
  auto a = make("S", {"x"}, {"y"}, {{"s0", "x", "s1"}, {"s1", "y", "s0"}});
  a.mark_error(1);
  auto dot = to_dot(a, std::vector<Transition>{{0, Event::of("x"), 0}});
  CHECK(dot.find("label=\"x?\"") != std::string::npos);
  CHECK(dot.find("label=\"y!\"") != std::string::npos);
  CHECK(dot.find("color=red") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(to_dot(a) == to_dot(a));

  Automaton empty("E");
  auto d = to_dot(empty);
  CHECK(d.find("->") == std::string::npos);
}

TEST_CASE("completion deltas round trip") {
  auto p = make("P", {"x"}, {"y"}, {{"a", "x", "b"}, {"b", "y", "a"}});
  std::vector<Automaton> procs{p};
  std::vector<std::vector<Transition>> added{{{0, Event::of("y"), 0}, {1, Event::of("x"), 1}}};
  auto text = format_deltas(procs, added);
  auto back = parse_deltas(text, procs);
  REQUIRE(back.size() == 1);
  CHECK(back[0].process == "P");
  auto sorted = added[0];
  std::sort(sorted.begin(), sorted.end());
  CHECK(back[0].transitions == sorted);
  CHECK_THROWS_AS(parse_deltas("delta Q\n", procs), ParseError);
}
