#ifndef PROTOSYNTH_EVENT_HPP
#define PROTOSYNTH_EVENT_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace protosynth {

/// Interned event token. Two events compare equal iff their names are equal,
/// so the same token denotes the same event in every automaton.
class Event {
public:
  Event() = default;

  /// Interns `name` (thread-safe). Throws std::invalid_argument on empty names.
  static Event of(std::string_view name);

  const std::string& name() const;
  std::uint32_t id() const { return id_; }

  friend bool operator==(Event a, Event b) { return a.id_ == b.id_; }
  /// Orders by name, so sorted containers iterate identically across runs.
  friend std::strong_ordering operator<=>(Event a, Event b) {
    if (a.id_ == b.id_) return std::strong_ordering::equal;
    return a.name() < b.name() ? std::strong_ordering::less : std::strong_ordering::greater;
  }

private:
  explicit Event(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

} // namespace protosynth

template <>
struct std::hash<protosynth::Event> {
  std::size_t operator()(protosynth::Event e) const noexcept { return e.id(); }
};

#endif // PROTOSYNTH_EVENT_HPP
