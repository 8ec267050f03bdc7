#include "protosynth/event.hpp"

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace protosynth {

namespace {

// Names live in fixed-size chunks so that readers never race with a
// reallocation; only interning takes the lock.
class Interner {
public:
  static constexpr std::size_t kChunkBits = 12;
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kMaxChunks = 1024;

  Interner() {
    // id 0 is the default-constructed (invalid) event
    intern_locked("");
  }

  std::uint32_t intern(std::string_view name) {
    std::lock_guard lock(mutex_);
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    return intern_locked(name);
  }

  const std::string& name(std::uint32_t id) const {
    const std::string* chunk = chunks_[id >> kChunkBits].load(std::memory_order_acquire);
    return chunk[id & (kChunkSize - 1)];
  }

private:
  std::uint32_t intern_locked(std::string_view name) {
    const auto id = static_cast<std::uint32_t>(count_);
    const std::size_t chunk = id >> kChunkBits;
    if (chunk >= kMaxChunks) throw std::length_error("event table exhausted");
    if (!owned_[chunk]) {
      owned_[chunk] = std::make_unique<std::string[]>(kChunkSize);
      chunks_[chunk].store(owned_[chunk].get(), std::memory_order_release);
    }
    owned_[chunk][id & (kChunkSize - 1)] = std::string(name);
    ids_.emplace(std::string(name), id);
    ++count_;
    return id;
  }

  std::mutex mutex_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::array<std::unique_ptr<std::string[]>, kMaxChunks> owned_;
  std::array<std::atomic<const std::string*>, kMaxChunks> chunks_{};
  std::size_t count_ = 0;
};

Interner& interner() {
  static Interner instance;
  return instance;
}

} // namespace

Event Event::of(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("event name must be nonempty");
  return Event(interner().intern(name));
}

const std::string& Event::name() const { return interner().name(id_); }

} // namespace protosynth
