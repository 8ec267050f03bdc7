#include "doctest.h"
#include "abp_fixtures.hpp"
#include "test_support.hpp"

#include "protosynth/verify.hpp"

using namespace protosynth;
using namespace testsupport;

namespace {

std::vector<Automaton> system_with(const Automaton& sender, const Automaton& receiver) {
  std::vector<Automaton> all{sender, receiver};
  for (auto& e : abp::environment()) all.push_back(e);
  return all;
}

RequirementProfile full(NonBlocking nb) { return {true, true, true, nb}; }

} // namespace

TEST_CASE("committed fixtures match the builders") {
  for (const auto& [name, contents] : abp::fixture_files()) {
    CAPTURE(name);
    CHECK(read_file(fixture("abp/" + name)) == contents);
  }
}

TEST_CASE("fixture automata are well formed") {
  for (const auto& a : system_with(abp::sender_manual(), abp::receiver_manual())) {
    CAPTURE(a.name());
    CHECK(validate(a).empty());
  }
  CHECK(is_deterministic(abp::sender_manual()));
  CHECK(is_deterministic(abp::receiver_manual()));
  CHECK(is_deterministic(abp::sender_computed()));
  CHECK(is_receptive(abp::forward_channel()));
  CHECK(is_receptive(abp::backward_channel()));
  CHECK(is_receptive(abp::safety_monitor()));
  CHECK(is_receptive(abp::liveness_monitor()));
  CHECK(abp::sender_computed().num_transitions() == 10);
}

TEST_CASE("manual solution passes the full profile") {
  auto p = compose_all(system_with(abp::sender_manual(), abp::receiver_manual()));
  CHECK(p.inputs().empty());
  auto rep = verify_all(p, full(NonBlocking::Strong));
  CHECK_MESSAGE(rep.passed(), format_report(p, rep));
  CHECK_FALSE(check_nonblocking(p, NonBlocking::Weak));
  CHECK_FALSE(check_liveness_empty(p, LivenessAlgorithm::Scc));
}

TEST_CASE("computed solution passes the full profile") {
  auto p = compose_all(system_with(abp::sender_computed(), abp::receiver_manual()));
  auto rep = verify_all(p, full(NonBlocking::Weak));
  CHECK_MESSAGE(rep.passed(), format_report(p, rep));
  CHECK(verify_all(p, full(NonBlocking::Strong)).passed());
}

TEST_CASE("mutations are caught") {
  // sender that skips waiting for the acknowledgment
  auto eager = abp::sender_manual();
  eager.add_transition(*eager.find_state("s2"), Event::of("send"), *eager.find_state("s1"));
  auto p = compose_all(system_with(eager, abp::receiver_manual()));
  auto run = check_safety(p);
  REQUIRE(run);
  CHECK(replay(p, *run));

  // receiver without its a1 edge gets stuck
  auto r = abp::receiver_manual();
  Automaton cut("Receiver");
  for (StateId q = 0; q < r.num_states(); ++q) cut.add_state(r.state_name(q));
  for (Event e : r.inputs()) cut.add_input(e);
  for (Event e : r.outputs()) cut.add_output(e);
  for (const auto& t : r.transitions())
    if (t.event != Event::of("a1")) cut.add_transition(t);
  auto q = compose_all(system_with(abp::sender_manual(), cut));
  auto rep = verify_all(q, full(NonBlocking::Strong));
  CHECK_FALSE(rep.passed());
  for (const auto& f : rep.findings) {
    if (f.run) CHECK(replay(q, *f.run));
    if (f.lasso) CHECK(replay(q, *f.lasso));
  }
}

TEST_CASE("liveness monitor rejects a sender that gives up") {
  auto lazy = abp::sender_manual();
  Automaton s("Sender");
  for (StateId q = 0; q < lazy.num_states(); ++q) s.add_state(lazy.state_name(q));
  for (Event e : lazy.inputs()) s.add_input(e);
  for (Event e : lazy.outputs()) s.add_output(e);
  for (const auto& t : lazy.transitions())
    s.add_transition(t.event == Event::of("timeout") ? Transition{t.src, t.event, t.src} : t);
  auto p = compose_all(system_with(s, abp::receiver_manual()));
  MESSAGE("product states: " << p.num_states());
  CHECK(verify_all(p, RequirementProfile{true, true, false, NonBlocking::Strong}).passed());
  auto l = check_liveness_empty(p);
  REQUIRE(l);
  CHECK(replay(p, *l));
  CHECK(check_liveness_empty(p, LivenessAlgorithm::Scc).has_value());
}
