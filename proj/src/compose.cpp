#include "protosynth/compose.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace protosynth {

namespace {

constexpr GlobalId kEmptySlot = std::numeric_limits<GlobalId>::max();

std::size_t hash_state(std::span<const StateId> s) {
  std::uint64_t h = 1469598103934665603ull;
  for (StateId q : s) {
    h ^= q + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

// Per-component successor table keyed by the product's dense event index.
struct LocalMoves {
  // moves[q] sorted by event index
  std::vector<std::vector<std::pair<std::uint32_t, StateId>>> moves;

  std::span<const std::pair<std::uint32_t, StateId>> on(StateId q, std::uint32_t k) const {
    const auto& m = moves[q];
    auto lo = std::lower_bound(m.begin(), m.end(), std::make_pair(k, StateId{0}));
    auto hi = lo;
    while (hi != m.end() && hi->first == k) ++hi;
    return {lo, hi};
  }
};

} // namespace

std::vector<Event> overlapping_outputs(std::span<const Automaton> components) {
  std::vector<Event> shared;
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j)
      for (Event e : components[i].outputs())
        if (components[j].has_output(e)) shared.push_back(e);
  std::sort(shared.begin(), shared.end());
  shared.erase(std::unique(shared.begin(), shared.end()), shared.end());
  return shared;
}

std::optional<GlobalId> Product::find(std::span<const StateId> s) const {
  if (s.size() != components_.size() || slots_.empty()) return std::nullopt;
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = hash_state(s) & mask;; i = (i + 1) & mask) {
    const GlobalId g = slots_[i];
    if (g == kEmptySlot) return std::nullopt;
    auto t = state(g);
    if (std::equal(t.begin(), t.end(), s.begin())) return g;
  }
}

std::optional<std::size_t> Product::sender_of(Event x) const {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), x);
  if (it == alphabet_.end() || *it != x) return std::nullopt;
  const int s = sender_[static_cast<std::size_t>(it - alphabet_.begin())];
  if (s < 0) return std::nullopt;
  return static_cast<std::size_t>(s);
}

std::vector<std::size_t> Product::receivers_of(Event x) const {
  auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), x);
  if (it == alphabet_.end() || *it != x) return {};
  return receivers_[static_cast<std::size_t>(it - alphabet_.begin())];
}

std::vector<std::pair<std::size_t, Transition>> Product::participants(GlobalId src,
                                                                      const Edge& e) const {
  std::vector<std::pair<std::size_t, Transition>> out;
  auto from = state(src);
  auto to = state(e.dst);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& a = components_[c];
    if (a.has_input(e.event) || a.has_output(e.event)) out.push_back({c, {from[c], e.event, to[c]}});
  }
  return out;
}

std::string Product::state_label(GlobalId g) const {
  std::string label = "(";
  auto s = state(g);
  for (std::size_t c = 0; c < s.size(); ++c) {
    if (c) label += ',';
    label += components_[c].state_name(s[c]);
  }
  return label + ")";
}

Automaton Product::to_automaton(std::string name) const {
  Automaton a(std::move(name));
  for (GlobalId g = 0; g < num_states(); ++g) a.add_state(state_label(g));
  if (num_states() > 0) a.set_initial(initial);
  for (Event e : inputs_) a.add_input(e);
  for (Event e : outputs_) a.add_output(e);
  for (GlobalId g = 0; g < num_states(); ++g) {
    if (error_[g]) a.mark_error(g);
    if (accepting_[g]) a.mark_accepting(g);
    for (const auto& e : successors(g)) a.add_transition(g, e.event, e.dst);
  }
  return a;
}

Product compose_all(std::vector<Automaton> components, const ComposeOptions& options) {
  if (auto shared = overlapping_outputs(components); !shared.empty()) {
    std::string msg = "composition undefined: shared outputs";
    for (Event e : shared) msg += " " + e.name();
    throw CompositionError(msg, std::move(shared));
  }
  for (const auto& a : components)
    if (a.num_states() == 0)
      throw std::invalid_argument("cannot compose automaton '" + a.name() + "' without states");

  Product p;
  p.components_ = std::move(components);
  const auto& comps = p.components_;
  const std::size_t n = comps.size();

  for (const auto& a : comps) {
    auto alpha = a.alphabet();
    p.alphabet_.insert(p.alphabet_.end(), alpha.begin(), alpha.end());
    p.outputs_.insert(p.outputs_.end(), a.outputs().begin(), a.outputs().end());
  }
  std::sort(p.alphabet_.begin(), p.alphabet_.end());
  p.alphabet_.erase(std::unique(p.alphabet_.begin(), p.alphabet_.end()), p.alphabet_.end());
  std::sort(p.outputs_.begin(), p.outputs_.end());
  for (Event e : p.alphabet_)
    if (!std::binary_search(p.outputs_.begin(), p.outputs_.end(), e)) p.inputs_.push_back(e);

  const std::size_t num_events = p.alphabet_.size();
  p.sender_.assign(num_events, -1);
  p.receivers_.assign(num_events, {});
  for (std::size_t k = 0; k < num_events; ++k)
    for (std::size_t c = 0; c < n; ++c) {
      if (comps[c].has_output(p.alphabet_[k])) p.sender_[k] = static_cast<int>(c);
      if (comps[c].has_input(p.alphabet_[k])) p.receivers_[k].push_back(c);
    }

  auto event_index = [&](Event e) {
    return static_cast<std::uint32_t>(std::lower_bound(p.alphabet_.begin(), p.alphabet_.end(), e) -
                                      p.alphabet_.begin());
  };
  std::vector<LocalMoves> local(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& a = comps[c];
    local[c].moves.resize(a.num_states());
    for (StateId q = 0; q < a.num_states(); ++q) {
      for (const auto& t : a.outgoing(q)) {
        // labels outside the interface never synchronize
        if (!a.has_input(t.event) && !a.has_output(t.event)) continue;
        local[c].moves[q].emplace_back(event_index(t.event), t.dst);
      }
      std::sort(local[c].moves[q].begin(), local[c].moves[q].end());
    }
  }

  std::vector<std::uint32_t> external_inputs;
  for (std::uint32_t k = 0; k < num_events; ++k)
    if (p.sender_[k] < 0) external_inputs.push_back(k);

  for (const auto& a : comps) {
    if (!a.error_states().empty()) p.has_error_marks_ = true;
    if (!a.accepting_states().empty()) p.has_accepting_marks_ = true;
  }

  p.slots_.assign(1024, kEmptySlot);
  std::size_t count = 0;

  auto grow = [&] {
    std::vector<GlobalId> fresh(p.slots_.size() * 2, kEmptySlot);
    const std::size_t mask = fresh.size() - 1;
    for (GlobalId g = 0; g < count; ++g) {
      std::size_t i = hash_state(p.state(g)) & mask;
      while (fresh[i] != kEmptySlot) i = (i + 1) & mask;
      fresh[i] = g;
    }
    p.slots_.swap(fresh);
  };

  // Looks up the candidate stored at the tail of storage_, committing it if new.
  auto intern_tail = [&]() -> GlobalId {
    std::span<const StateId> cand(p.storage_.data() + count * n, n);
    const std::size_t mask = p.slots_.size() - 1;
    std::size_t i = hash_state(cand) & mask;
    for (;; i = (i + 1) & mask) {
      const GlobalId g = p.slots_[i];
      if (g == kEmptySlot) break;
      auto t = p.state(g);
      if (std::equal(t.begin(), t.end(), cand.begin())) {
        p.storage_.resize(count * n);
        return g;
      }
    }
    if (count >= options.max_states)
      throw StateLimitError("product exceeds " + std::to_string(options.max_states) + " states");
    const auto g = static_cast<GlobalId>(count++);
    p.slots_[i] = g;
    bool err = false, acc = false;
    for (std::size_t c = 0; c < n; ++c) {
      err = err || comps[c].is_error(cand[c]);
      acc = acc || comps[c].is_accepting(cand[c]);
    }
    p.error_.push_back(err);
    p.accepting_.push_back(acc);
    if (count * 2 > p.slots_.size()) grow();
    return g;
  };

  for (const auto& a : comps) p.storage_.push_back(a.initial());
  intern_tail();

  std::vector<StateId> current(n);
  std::vector<std::span<const std::pair<std::uint32_t, StateId>>> options_per_receiver;

  // Emits every joint move on event k in which `movers` each take one local
  // transition (cartesian product over their choices).
  auto expand = [&](std::uint32_t k, const std::vector<std::size_t>& movers,
                    const std::vector<std::span<const std::pair<std::uint32_t, StateId>>>& choices) {
    std::vector<std::size_t> pick(movers.size(), 0);
    while (true) {
      const std::size_t base = p.storage_.size();
      p.storage_.insert(p.storage_.end(), current.begin(), current.end());
      for (std::size_t m = 0; m < movers.size(); ++m)
        p.storage_[base + movers[m]] = choices[m][pick[m]].second;
      const GlobalId dst = intern_tail();
      p.edges_.push_back({p.alphabet_[k], dst});
      std::size_t m = 0;
      for (; m < movers.size(); ++m) {
        if (++pick[m] < choices[m].size()) break;
        pick[m] = 0;
      }
      if (m == movers.size()) break;
    }
  };

  std::vector<std::size_t> movers;
  std::vector<std::span<const std::pair<std::uint32_t, StateId>>> choices;
  p.offsets_.push_back(0);
  for (GlobalId g = 0; g < count; ++g) {
    auto s = p.state(g);
    std::copy(s.begin(), s.end(), current.begin());
    const std::size_t edge_begin = p.edges_.size();

    for (std::size_t c = 0; c < n; ++c) {
      const auto& moves = local[c].moves[current[c]];
      for (std::size_t i = 0; i < moves.size();) {
        const std::uint32_t k = moves[i].first;
        std::size_t j = i;
        while (j < moves.size() && moves[j].first == k) ++j;
        if (p.sender_[k] == static_cast<int>(c)) {
          movers.assign(1, c);
          choices.assign(1, std::span(moves.data() + i, j - i));
          bool blocked = false;
          for (std::size_t r : p.receivers_[k]) {
            auto opts = local[r].on(current[r], k);
            if (opts.empty()) {
              blocked = true;
              break;
            }
            movers.push_back(r);
            choices.push_back(opts);
          }
          if (!blocked) expand(k, movers, choices);
        }
        i = j;
      }
    }
    for (std::uint32_t k : external_inputs) {
      movers.clear();
      choices.clear();
      bool blocked = false;
      for (std::size_t r : p.receivers_[k]) {
        auto opts = local[r].on(current[r], k);
        if (opts.empty()) {
          blocked = true;
          break;
        }
        movers.push_back(r);
        choices.push_back(opts);
      }
      if (!blocked && !movers.empty()) expand(k, movers, choices);
    }

    // Stable edge order: by event, then destination.
    std::sort(p.edges_.begin() + static_cast<std::ptrdiff_t>(edge_begin), p.edges_.end(),
              [](const Product::Edge& a, const Product::Edge& b) {
                if (a.event != b.event) return a.event < b.event;
                return a.dst < b.dst;
              });
    p.edges_.erase(std::unique(p.edges_.begin() + static_cast<std::ptrdiff_t>(edge_begin),
                               p.edges_.end(),
                               [](const Product::Edge& a, const Product::Edge& b) {
                                 return a.event == b.event && a.dst == b.dst;
                               }),
                   p.edges_.end());
    p.offsets_.push_back(static_cast<std::uint32_t>(p.edges_.size()));
  }
  return p;
}

bool sync_enabled(const Product& p, GlobalId g, Event x) {
  auto sender = p.sender_of(x);
  if (!sender) throw std::invalid_argument("event '" + x.name() + "' is not an output of any component");
  auto s = p.state(g);
  auto comps = p.components();
  auto can = [&](std::size_t c) {
    for (const auto& t : comps[c].outgoing(s[c]))
      if (t.event == x) return true;
    return false;
  };
  if (!can(*sender)) return false;
  for (std::size_t r : p.receivers_of(x))
    if (!can(r)) return false;
  return true;
}

} // namespace protosynth
