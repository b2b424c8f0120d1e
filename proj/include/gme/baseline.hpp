#pragma once

#include <atomic>
#include <vector>

#include "gme/native.hpp"
#include "gme/trace.hpp"
#include "gme/types.hpp"

namespace gme {

// Mutual-exclusion stand-in for a GME lock: an FAA ticket lock that
// serializes every critical section regardless of session. Trivially safe,
// no concurrent entering.
class TicketBaseline {
 public:
  explicit TicketBaseline(std::uint32_t instances) : locks_(instances) {}

  void enter(std::uint32_t pid, std::uint32_t instance, Word session,
             TraceRecorder* trace = nullptr) {
    Lock& l = locks_[instance - 1];
    const Word ticket = l.next.fetch_add(1);
    SpinBackoff backoff;
    while (l.serving.load() != ticket) backoff.pause();
    if (trace) trace->emit(pid, instance, session, EventKind::kEnterReturn);
  }

  void exit(std::uint32_t pid, std::uint32_t instance, TraceRecorder* trace = nullptr) {
    if (trace) trace->emit(pid, instance, kSessionNone, EventKind::kExitCall);
    locks_[instance - 1].serving.fetch_add(1);
  }

 private:
  struct alignas(64) Lock {
    std::atomic<Word> next{0};
    std::atomic<Word> serving{0};
  };
  std::vector<Lock> locks_;
};

}  // namespace gme
