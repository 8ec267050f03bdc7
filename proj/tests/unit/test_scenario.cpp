#include "doctest.h"
#include "abp_fixtures.hpp"
#include "test_support.hpp"

#include "protosynth/scenario.hpp"

using namespace protosynth;
using namespace testsupport;

namespace {

std::vector<Automaton> abp_interfaces() { return {abp::sender_interface(), abp::receiver_interface()}; }

std::size_t missing_input_slots(const Automaton& a) {
  std::size_t n = 0;
  for (StateId q = 0; q < a.num_states(); ++q) {
    if (classify_state(a, q) != StateClass::Input) continue;
    for (Event x : a.inputs()) {
      bool has = false;
      for (const auto& t : a.outgoing(q)) has = has || t.event == x;
      n += !has;
    }
  }
  return n;
}

} // namespace

TEST_CASE("parse scenario 1") {
  auto ifs = abp_interfaces();
  auto set = parse_scenarios(abp::scenario1_text(), ifs, "s1.scn");
  REQUIRE(set.scenarios.size() == 1);
  const auto& s = set.scenarios[0];
  CHECK(s.lanes.size() == 2);
  const Lane* sender = s.lane("Sender");
  REQUIRE(sender);
  CHECK(sender->items.size() == 12);
  CHECK(std::count_if(sender->items.begin(), sender->items.end(),
                      [](const LaneItem& i) { return i.kind == LaneItem::Kind::Label; }) == 3);
  CHECK(s.symmetric_under == std::optional<std::string>("mirror"));
  auto again = parse_scenarios(format_scenarios(set), ifs);
  CHECK(again.scenarios[0].lanes == s.lanes);
}

TEST_CASE("scenario parse errors") {
  auto ifs = abp_interfaces();
  CHECK_THROWS_AS(parse_scenarios("", ifs), ParseError);
  CHECK_THROWS_AS(parse_scenarios("scenario s\n", ifs), ParseError);
  try {
    parse_scenarios("scenario s\nlane Sender\n!send\n?send\n", ifs, "x.scn");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("send") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenarios("scenario s\nlane Nobody\n", ifs), ParseError);
  CHECK_THROWS_AS(parse_scenarios("scenario s symmetric nope\nlane Sender\n!send\n", ifs), ParseError);
  CHECK_THROWS_AS(parse_scenarios("subst m\nmap p0 p1\nmap p1 p1\n", ifs), ParseError);
}

TEST_CASE("skeleton of a lane") {
  auto iface = make("P", {}, {"x"}, {});
  Scenario s{"one", {{"P", {LaneItem::send(Event::of("x"))}}}, std::nullopt};
  auto sk = lane_to_skeleton(s, iface);
  CHECK(sk.automaton.num_states() == 2);
  CHECK(sk.automaton.num_transitions() == 1);

  Scenario a{"a", {{"P", {LaneItem::send(Event::of("x")), LaneItem::send(Event::of("x"))}}}, std::nullopt};
  Scenario b{"b", {{"P", {LaneItem::send(Event::of("x"))}}}, std::nullopt};
  std::vector<Scenario> both{a, b};
  CHECK(build_skeleton(both, iface).automaton.num_states() == 3);

  // no labels: merging is the identity
  auto merged = merge_labels(lane_to_skeleton(a, iface));
  CHECK(merged.automaton.num_states() == 3);
  CHECK(merged.automaton.num_transitions() == 2);
}

TEST_CASE("scenario 1 yields the six-state cycles") {
  auto ifs = abp_interfaces();
  auto set = parse_scenarios(abp::scenario1_text(), ifs);
  for (bool expand : {false, true}) {
    auto procs = compile_scenarios(set, ifs, {expand});
    REQUIRE(procs.size() == 2);
    CHECK(procs[0].num_states() == 6);
    CHECK(procs[1].num_states() == 6);
    CHECK(procs[0].num_transitions() == 6);
    CHECK(procs[1].num_transitions() == 6);
    for (const auto& p : procs) CHECK(is_deterministic(p));
    CHECK(missing_input_slots(procs[0]) + missing_input_slots(procs[1]) == 6);
    CHECK_FALSE(is_receptive(procs[0]));
  }
}

TEST_CASE("all scenarios yield 12 and 8 states") {
  auto ifs = abp_interfaces();
  auto set = parse_scenarios(abp::all_scenarios_text(), ifs);
  auto procs = compile_scenarios(set, ifs);
  CHECK(procs[0].num_states() == 12);
  CHECK(procs[1].num_states() == 8);
  CHECK(is_deterministic(procs[0]));
  CHECK(is_deterministic(procs[1]));
  CHECK(missing_input_slots(procs[0]) == 8);
  CHECK(missing_input_slots(procs[1]) == 0);
  // the q1 state of the merged sender handles a0', a1' and timeout
  const Automaton& s = procs[0];
  StateId after_p0 = 0;
  for (const auto& t : s.transitions())
    if (t.event == Event::of("p0") && s.state_name(t.src) != "bs0") {
      bool from_send = false;
      for (const auto& u : s.transitions()) from_send = from_send || (u.dst == t.src && u.event == Event::of("send"));
      if (from_send) after_p0 = t.dst;
    }
  CHECK(s.outgoing(after_p0).size() == 3);
}

TEST_CASE("merging is idempotent") {
  auto ifs = abp_interfaces();
  auto set = parse_scenarios(abp::all_scenarios_text(), ifs);
  auto all = expand_scenarios(set);
  for (const auto& iface : ifs) {
    auto once = merge_labels(build_skeleton(all, iface));
    auto twice = merge_labels(once);
    CHECK(twice.automaton == once.automaton);
    CHECK(twice.labels == once.labels);
  }
}

TEST_CASE("merge conflicts are reported") {
  auto iface = make("P", {"i"}, {"x", "y"}, {});
  Scenario s{"c",
             {{"P",
               {LaneItem::mark("L"), LaneItem::send(Event::of("x")), LaneItem::mark("L"),
                LaneItem::send(Event::of("y"))}}},
             std::nullopt};
  try {
    merge_labels(lane_to_skeleton(s, iface));
    FAIL("expected a merge conflict");
  } catch (const ScenarioError& e) {
    std::string msg = e.what();
    CHECK(msg.find("x") != std::string::npos);
    CHECK(msg.find("y") != std::string::npos);
  }
}

TEST_CASE("symmetry") {
  auto ifs = abp_interfaces();
  auto set = parse_scenarios(abp::scenario1_text(), ifs);
  const auto& s = set.scenarios[0];
  const Substitution& sub = *set.substitution("mirror");
  auto m = apply_symmetry(s, sub);
  CHECK(m.lane("Sender")->items[0].label == "bs1");
  CHECK(m.lane("Sender")->items[2].event == Event::of("p1"));
  CHECK(apply_symmetry(m, sub).lanes == s.lanes);

  Substitution identity{"id", {}, {}};
  for (const auto& lane : s.lanes)
    for (const auto& item : lane.items)
      if (item.kind != LaneItem::Kind::Label) identity.events[item.event] = item.event;
  CHECK(apply_symmetry(s, identity).lanes == s.lanes);

  Substitution partial = sub;
  partial.events.erase(Event::of("p0"));
  CHECK_THROWS_AS(apply_symmetry(s, partial), ScenarioError);
}

TEST_CASE("scenarios replay on the compiled skeletons") {
  auto ifs = abp_interfaces();
  auto set = parse_scenarios(abp::all_scenarios_text(), ifs);
  auto procs = compile_scenarios(set, ifs);
  std::vector<Automaton> comps = procs;
  comps.push_back(abp::forward_channel());
  comps.push_back(abp::backward_channel());
  comps.push_back(abp::timer());
  for (const auto& s : expand_scenarios(set))
    if (s.starts_at_initial) CHECK_MESSAGE(scenario_replayable(s, comps), s.name);

  // the manual solution exhibits scenario 1 as well
  std::vector<Automaton> manual{abp::sender_manual(), abp::receiver_manual(), abp::forward_channel(),
                                abp::backward_channel(), abp::timer()};
  CHECK(scenario_replayable(set.scenarios[0], manual));
  // a receiver that never delivers does not
  auto mute = abp::receiver_manual();
  Automaton cut("Receiver");
  for (StateId q = 0; q < mute.num_states(); ++q) cut.add_state(mute.state_name(q));
  for (Event e : mute.inputs()) cut.add_input(e);
  for (Event e : mute.outputs()) cut.add_output(e);
  manual[1] = cut;
  CHECK_FALSE(scenario_replayable(set.scenarios[0], manual));
}
