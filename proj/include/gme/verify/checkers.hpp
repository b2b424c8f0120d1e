#pragma once

#include <string>
#include <vector>

#include "gme/trace.hpp"
#include "gme/types.hpp"

namespace gme::verify {

struct Verdict {
  std::string property;
  bool pass = true;
  bool harness_error = false;  // malformed input, not a property failure
  std::string detail;
};

// P1, group mutual exclusion: per instance, the processes between
// enter-return and exit-call always share one session.
Verdict check_gme(const std::vector<TraceEvent>& trace);

// Context-switch complexity: per passage, sessions established on its
// instance between its announce and its enter-return stay within
// min(interval contention, n) + 1; in aggregate within sum(point
// contention + 1).
struct ContextSwitchStats {
  std::uint64_t passages = 0;
  std::uint32_t max_established = 0;
  std::uint64_t total_established = 0;
  std::uint64_t amortized_budget = 0;  // sum over passages of cdot + 1
};
Verdict check_context_switch(const std::vector<TraceEvent>& trace, std::uint32_t n,
                             ContextSwitchStats* stats = nullptr);

}  // namespace gme::verify
