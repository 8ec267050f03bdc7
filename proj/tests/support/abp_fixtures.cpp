#include "abp_fixtures.hpp"

#include "protosynth/automaton_io.hpp"

#include <array>
#include <tuple>

namespace abp {

using protosynth::Event;
using protosynth::StateId;

namespace {

Event ev(const std::string& s) { return Event::of(s); }

Automaton build(const std::string& name, std::vector<std::string> in, std::vector<std::string> out,
                std::vector<std::string> states,
                std::vector<std::tuple<std::string, std::string, std::string>> trans) {
  Automaton a(name);
  for (auto& s : states) a.add_state(s);
  a.set_initial(0);
  for (auto& e : in) a.add_input(ev(e));
  for (auto& e : out) a.add_output(ev(e));
  for (auto& [s, e, d] : trans) a.add_transition(*a.find_state(s), ev(e), *a.find_state(d));
  return a;
}

const std::vector<std::string> kSenderIn{"a0'", "a1'", "timeout"};
const std::vector<std::string> kSenderOut{"send", "p0", "p1"};
const std::vector<std::string> kReceiverIn{"p0'", "p1'"};
const std::vector<std::string> kReceiverOut{"deliver", "a0", "a1"};
const std::vector<std::string> kSenderStates{"s0", "s1", "s2", "s3", "s4", "s5"};
const std::vector<std::string> kReceiverStates{"r0", "r1", "r2", "r3", "r4", "r5"};

} // namespace

Automaton sender_interface() { return build("Sender", kSenderIn, kSenderOut, {"s0"}, {}); }
Automaton receiver_interface() { return build("Receiver", kReceiverIn, kReceiverOut, {"r0"}, {}); }

Automaton sender_manual() {
  return build("Sender", kSenderIn, kSenderOut, kSenderStates,
               {{"s0", "send", "s1"}, {"s1", "p0", "s2"}, {"s2", "timeout", "s1"}, {"s2", "a1'", "s2"},
                {"s2", "a0'", "s3"}, {"s3", "send", "s4"}, {"s4", "p1", "s5"}, {"s5", "timeout", "s4"},
                {"s5", "a0'", "s5"}, {"s5", "a1'", "s0"}});
}

Automaton sender_computed() {
  return build("Sender", kSenderIn, kSenderOut, kSenderStates,
               {{"s0", "send", "s1"}, {"s1", "p0", "s2"}, {"s2", "timeout", "s1"}, {"s2", "a1'", "s1"},
                {"s2", "a0'", "s3"}, {"s3", "send", "s4"}, {"s4", "p1", "s5"}, {"s5", "timeout", "s4"},
                {"s5", "a0'", "s4"}, {"s5", "a1'", "s0"}});
}

Automaton receiver_manual() {
  return build("Receiver", kReceiverIn, kReceiverOut, kReceiverStates,
               {{"r0", "p0'", "r1"}, {"r1", "deliver", "r2"}, {"r2", "a0", "r3"}, {"r3", "p0'", "r2"},
                {"r3", "p1'", "r4"}, {"r4", "deliver", "r5"}, {"r5", "a1", "r0"}, {"r0", "p1'", "r5"}});
}

Automaton channel(const std::string& name, const std::string& m0, const std::string& m1) {
  const std::array<std::string, 2> msg{m0, m1};
  Automaton a = build(name, {m0, m1}, {m0 + "'", m1 + "'"}, {"empty", "h0", "h1"}, {});
  for (StateId q = 0; q < 3; ++q)
    for (int x = 0; x < 2; ++x) {
      a.add_transition(q, ev(msg[x]), static_cast<StateId>(1 + x));  // store, overwriting
      a.add_transition(q, ev(msg[x]), 0);                             // lose
    }
  for (int x = 0; x < 2; ++x) {
    const auto h = static_cast<StateId>(1 + x);
    a.add_transition(h, ev(msg[x] + "'"), 0);  // deliver
    a.add_transition(h, ev(msg[x] + "'"), h);  // deliver and keep a duplicate
  }
  return a;
}

Automaton forward_channel() { return channel("FC", "p0", "p1"); }
Automaton backward_channel() { return channel("BC", "a0", "a1"); }

Automaton timer() { return build("Timer", {}, {"timeout"}, {"t0"}, {{"t0", "timeout", "t0"}}); }

Automaton safety_monitor() {
  auto a = build("Safety", {"send", "deliver"}, {}, {"m0", "m1", "err"},
                 {{"m0", "send", "m1"}, {"m1", "deliver", "m0"}, {"m0", "deliver", "err"},
                  {"m1", "send", "err"}, {"err", "send", "err"}, {"err", "deliver", "err"}});
  a.mark_error(2);
  return a;
}

Automaton liveness_monitor() {
  // Tracking states (kind, fc, bc, phase). A channel in mode `fin` may neither
  // receive nor emit again; in mode `inf` it must do both infinitely often.
  // Phases cycle through the obligations of the `inf` channels; `acc` is
  // reached once per round.
  const std::vector<std::string> observed{"send", "deliver", "p0", "p1", "p0'", "p1'",
                                          "a0", "a1", "a0'", "a1'"};
  enum Phase { FcIn, FcOut, BcIn, BcOut, Acc };
  const char* phase_name[] = {"fcin", "fcout", "bcin", "bcout", "acc"};
  const char* kinds[] = {"sd", "ds", "ns"};
  const char* modes[] = {"inf", "fin"};

  Automaton a("Liveness");
  for (auto& e : observed) a.add_input(ev(e));
  const StateId start = a.add_state("start");
  const StateId idle = a.add_state("idle");
  a.set_initial(start);
  auto tracking = [](int kind, int fc, int bc, int phase, const char* const* k, const char* const* m,
                     const char* const* p) {
    return std::string(k[kind]) + "_" + m[fc] + "_" + m[bc] + "_" + p[phase];
  };
  for (int k = 0; k < 3; ++k)
    for (int fc = 0; fc < 2; ++fc)
      for (int bc = 0; bc < 2; ++bc)
        for (int ph = 0; ph < 5; ++ph) {
          auto q = a.add_state(tracking(k, fc, bc, ph, kinds, modes, phase_name));
          if (ph == Acc) a.mark_accepting(q);
        }
  auto id = [&](int k, int fc, int bc, int ph) {
    return *a.find_state(tracking(k, fc, bc, ph, kinds, modes, phase_name));
  };
  auto is = [](const std::string& e, std::initializer_list<const char*> set) {
    for (auto* s : set)
      if (e == s) return true;
    return false;
  };

  for (const auto& e : observed) {
    a.add_transition(start, ev(e), start);
    a.add_transition(idle, ev(e), idle);
    for (int fc = 0; fc < 2; ++fc)
      for (int bc = 0; bc < 2; ++bc) {
        if (e == "send") a.add_transition(start, ev(e), id(0, fc, bc, FcIn));
        if (e == "deliver") a.add_transition(start, ev(e), id(1, fc, bc, FcIn));
        a.add_transition(start, ev(e), id(2, fc, bc, FcIn));
      }
    const bool fc_in = is(e, {"p0", "p1"}), fc_out = is(e, {"p0'", "p1'"});
    const bool bc_in = is(e, {"a0", "a1"}), bc_out = is(e, {"a0'", "a1'"});
    for (int k = 0; k < 3; ++k)
      for (int fc = 0; fc < 2; ++fc)
        for (int bc = 0; bc < 2; ++bc)
          for (int ph = 0; ph < 5; ++ph) {
            const StateId from = id(k, fc, bc, ph);
            const bool fc_fin = fc == 1, bc_fin = bc == 1;
            const bool killed = (k == 0 && e == "deliver") || (k != 0 && e == "send") ||
                                (fc_fin && (fc_in || fc_out)) || (bc_fin && (bc_in || bc_out));
            if (killed) {
              a.add_transition(from, ev(e), idle);
              continue;
            }
            int next = ph == Acc ? FcIn : ph;
            if (next == FcIn && (fc_fin || fc_in)) next = FcOut;
            if (next == FcOut && (fc_fin || fc_out)) next = BcIn;
            if (next == BcIn && (bc_fin || bc_in)) next = BcOut;
            if (next == BcOut && (bc_fin || bc_out)) next = Acc;
            a.add_transition(from, ev(e), id(k, fc, bc, next));
          }
  }
  return a;
}

Automaton empty_process(const Automaton& iface, int n, const std::string& prefix) {
  Automaton a(iface.name());
  for (int i = 0; i < n; ++i) a.add_state(prefix + std::to_string(i));
  a.set_initial(0);
  for (Event e : iface.inputs()) a.add_input(e);
  for (Event e : iface.outputs()) a.add_output(e);
  return a;
}

std::vector<Automaton> environment() {
  return {forward_channel(), backward_channel(), timer(), safety_monitor(), liveness_monitor()};
}

namespace {

const char* kSubst = R"(# exchange the roles of bit 0 and bit 1
subst mirror
map send send
map deliver deliver
map timeout timeout
map p0 p1
map p1 p0
map p0' p1'
map p1' p0'
map a0 a1
map a1 a0
map a0' a1'
map a1' a0'
maplabel bs0 bs1
maplabel bs1 bs0
maplabel br0 br1
maplabel br1 br0
)";

const char* kScenario1 = R"(
# no loss
scenario no_loss symmetric mirror
lane Sender
@bs0 !send !p0 ?a0'
@bs1 !send !p1 ?a1'
@bs0 !send !p0 ?a0'
lane Receiver
@br0 ?p0' !deliver !a0
@br1 ?p1' !deliver !a1
@br0 ?p0' !deliver !a0
)";

const char* kOtherScenarios = R"(
# lost packet
scenario lost_packet symmetric mirror
lane Sender
@bs0 !send !p0 ?a0'
@bs1 !send !p1 ?timeout !p1 ?a1'
@bs0 !send !p0 ?a0'
@bs1
lane Receiver
@br0 ?p0' !deliver !a0
@br1 ?p1' !deliver !a1
@br0 ?p0' !deliver !a0
@br1

# lost acknowledgment
scenario lost_ack symmetric mirror
lane Sender
@bs0 !send !p0 ?a0'
@bs1 !send !p1 ?timeout !p1 ?a1'
@bs0 !send !p0 ?a0'
@bs1
lane Receiver
@br0 ?p0' !deliver !a0
@br1 ?p1' !deliver !a1
@br0 ?p1' !a1
@br0 ?p0' !deliver !a0
@br1

# premature timeout and duplication
scenario premature_timeout symmetric mirror
lane Sender
@bs0 !send !p0 ?a0'
@bs1 !send !p1 ?timeout !p1 ?a1'
@bs0 !send !p0 ?a1' ?a0'
@bs1
lane Receiver
@br0 ?p0' !deliver !a0
@br1 ?p1' !deliver !a1
@br0 ?p1' !a1
@br0 ?p0' !deliver !a0
@br1
)";

} // namespace

std::string scenario1_text() { return std::string(kSubst) + kScenario1; }
std::string all_scenarios_text() { return std::string(kSubst) + kScenario1 + kOtherScenarios; }

std::vector<std::pair<std::string, std::string>> fixture_files() {
  using protosynth::format_automaton;
  const std::string header = "# generated by gen_fixtures; do not edit\n";
  auto aut = [&](const Automaton& a) { return header + format_automaton(a); };
  std::vector<std::pair<std::string, std::string>> files{
      {"sender_interface.aut", aut(sender_interface())},
      {"receiver_interface.aut", aut(receiver_interface())},
      {"sender_manual.aut", aut(sender_manual())},
      {"receiver_manual.aut", aut(receiver_manual())},
      {"sender_computed.aut", aut(sender_computed())},
      {"forward_channel.aut", aut(forward_channel())},
      {"backward_channel.aut", aut(backward_channel())},
      {"timer.aut", aut(timer())},
      {"safety_monitor.aut", aut(safety_monitor())},
      {"liveness_monitor.aut", aut(liveness_monitor())},
      {"sender_empty.aut", aut(empty_process(sender_interface(), 6, "s"))},
      {"receiver_empty.aut", aut(empty_process(receiver_interface(), 6, "r"))},
      {"scenario1.scn", header + scenario1_text()},
      {"scenarios.scn", header + all_scenarios_text()},
  };
  const std::string env =
      "environment forward_channel.aut\n"
      "environment backward_channel.aut\n"
      "environment timer.aut\n"
      "monitor safety_monitor.aut\n"
      "monitor liveness_monitor.aut\n";
  const std::string synth_profile = "require deadlock safety liveness nonblocking=strong\n";
  files.push_back({"manual.manifest", header + env +
                                          "process sender_manual.aut\nprocess receiver_manual.aut\n"
                                          "require deadlock safety liveness nonblocking=strong\n"});
  files.push_back({"computed.manifest", header + env +
                                            "process sender_computed.aut\nprocess receiver_manual.aut\n"
                                            "require deadlock safety liveness nonblocking=weak\n"});
  files.push_back({"scenario1.manifest", header + env +
                                             "process sender_interface.aut\nprocess receiver_interface.aut\n"
                                             "scenarios scenario1.scn\n" + synth_profile + "engine bdd\n"});
  files.push_back({"all_scenarios.manifest", header + env +
                                                 "process sender_interface.aut\nprocess receiver_interface.aut\n"
                                                 "scenarios scenarios.scn\n" + synth_profile +
                                                 "engine explicit\n"});
  files.push_back({"no_scenario.manifest", header + env +
                                               "process sender_empty.aut\nprocess receiver_empty.aut\n" +
                                               synth_profile + "engine explicit\n"});
  return files;
}

} // namespace abp
