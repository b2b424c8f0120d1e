#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <vector>

#include "gme/types.hpp"

namespace gme {

enum class EventKind : std::uint8_t {
  kAnnounce,
  kEnterReturn,
  kExitCall,
  kSessionEstablished,
  kRetire,
};

struct TraceEvent {
  std::uint64_t seq = 0;
  std::uint32_t pid = 0;
  std::uint32_t instance = 0;
  Word session = kSessionNone;
  EventKind kind = EventKind::kAnnounce;
};

// Timestamps come from one FAA ticket, so the per-thread buffers merge into a
// single linearizable history. Events are emitted outside the algorithm's own
// shared cells and do not perturb its step counts.
class TraceRecorder {
 public:
  explicit TraceRecorder(std::uint32_t processes) : buffers_(processes + 1) {}

  void emit(std::uint32_t pid, std::uint32_t instance, Word session, EventKind kind) {
    const std::uint64_t seq = ticket_.fetch_add(1, std::memory_order_relaxed);
    buffers_[pid].push_back(TraceEvent{seq, pid, instance, session, kind});
  }

  // Merge per-process buffers; call after all emitters joined.
  std::vector<TraceEvent> collect() const {
    std::vector<TraceEvent> all;
    std::size_t total = 0;
    for (const auto& b : buffers_) total += b.size();
    all.reserve(total);
    for (const auto& b : buffers_) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end(),
              [](const TraceEvent& a, const TraceEvent& b) { return a.seq < b.seq; });
    return all;
  }

  void clear() {
    for (auto& b : buffers_) b.clear();
    ticket_.store(0, std::memory_order_relaxed);
  }

 private:
  std::atomic<std::uint64_t> ticket_{0};
  std::vector<std::vector<TraceEvent>> buffers_;
};

}  // namespace gme
