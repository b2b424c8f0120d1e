#pragma once

#include <cstdint>
#include <vector>

#include "gme/types.hpp"

namespace gme {

// Progress of the incremental cleanup through one epoch. Private to the
// owning process; persisted across passages.
struct CleanupCursor {
  enum Phase : std::uint8_t {
    kMarkUnknown = 0,  // set condition of every passive-pool node to UNKNOWN
    kScan,             // scan all hazard slots, mark own UNKNOWN nodes UNSAFE
    kPartition,        // move UNSAFE nodes to the front, mark the rest SAFE
    kDoneWork,         // scan finished, waiting for the epoch boundary
  };
  std::uint8_t phase = kMarkUnknown;
  std::uint8_t scan_stage = 0;  // stage within one hazard-slot inspection
  std::uint32_t idx = 0;        // cursor within the current phase
  std::uint32_t part_left = 0;  // partition boundary: slots below are UNSAFE
  Word scan_node = kNullNode;   // hazard value under inspection
};

// Per-process state. A context is driven by at most one thread at a time.
// Entry/exit sections on distinct instances never interleave within the
// thread, so one context serves nested passages.
struct ProcessContext {
  std::uint32_t me = 0;  // process id, 1..n

  // Reclaiming build: two pools of 3n node refs each. `which` selects the
  // active pool; `marker` is the next slot to consume (0-based).
  std::vector<Word> pool[2];
  std::uint32_t which = 0;
  std::uint32_t marker = 0;
  std::uint32_t passage_in_epoch = 0;
  CleanupCursor cleanup{};

  std::uint32_t pool_size() const { return static_cast<std::uint32_t>(pool[0].size()); }
};

}  // namespace gme
