#pragma once

#include <utility>

#include "gme/context.hpp"
#include "gme/state_flags.hpp"
#include "gme/types.hpp"

namespace gme {

// Resumable fragments of the protocol. Each step() performs at most one
// shared-cell operation and returns true when the fragment is finished, so
// the simulated backend can interleave them at cell-op granularity while the
// native backend just loops.

// Sets one guard flag (LEADERLESS or CONFLICT) with a read-test-CAS loop.
// A CAS can fail only when another flag lands first, so the loop runs O(1)
// times (at most 3 reads and 2 CAS attempts).
struct GuardFlagStep {
  std::uint8_t stage = 0;
  Word observed = 0;
  std::uint32_t reads = 0;
  std::uint32_t cas_tries = 0;

  void reset() { *this = GuardFlagStep{}; }

  template <class Ops>
  bool step(Ops& ops, Word node, Word flag) {
    if (stage == 0) {
      observed = ops.read_state(node);
      ++reads;
      if (observed & flag) return true;
      stage = 1;
      return false;
    }
    stage = 0;
    ++cas_tries;
    return ops.cas_state(node, observed, observed | flag);
  }
};

// Sets the VACANT flag if the session is closed and emptied. The early
// returns and a failed CAS yield false; only the caller whose CAS landed
// gets true (the DSM exit path keys its broadcast on this).
struct VacantFlagStep {
  std::uint8_t stage = 0;
  Word observed = 0;
  bool result = false;

  void reset() { *this = VacantFlagStep{}; }

  template <class Ops>
  bool step(Ops& ops, Word node) {
    switch (stage) {
      case 0:
        observed = ops.read_state(node);
        if (!is_closed(observed)) {
          result = false;
          return true;
        }
        stage = 1;
        return false;
      case 1:
        if (ops.read_size(node) != 0) {
          result = false;
          return true;
        }
        stage = 2;
        return false;
      default:
        result = ops.cas_state(node, observed, observed | kVacant);
        return true;
    }
  }
};

// Reads the current head. The reclaiming build publishes the snapshot to
// hazard slot 0 and re-validates until the head is stable.
struct ReadHeadStep {
  std::uint8_t stage = 0;
  Word snapshot = kNullNode;
  std::uint32_t iterations = 0;

  void reset() { *this = ReadHeadStep{}; }

  template <class Ops>
  bool step(Ops& ops, std::uint32_t me, std::uint32_t instance, bool reclaim) {
    switch (stage) {
      case 0:
        snapshot = ops.read_head(instance);
        ++iterations;
        if (!reclaim) return true;
        stage = 1;
        return false;
      case 1:
        ops.write_hazard(me, 0, snapshot);
        stage = 2;
        return false;
      default:
        if (ops.read_head(instance) == snapshot) {
          ops.note_validated(me, 0, snapshot);
          return true;
        }
        stage = 0;
        return false;
    }
  }
};

// One micro-step of the lazy cleanup. The full procedure (mark the passive
// pool UNKNOWN, scan all 2n hazard slots, partition + mark SAFE) costs at
// most 19n+1 micro-steps and is spread across the epoch's passages.
template <class Ops>
inline void cleanup_step(Ops& ops, ProcessContext& ctx, std::uint32_t n) {
  CleanupCursor& cl = ctx.cleanup;
  std::vector<Word>& passive = ctx.pool[1 - ctx.which];
  const std::uint32_t slots = ctx.pool_size();
  switch (cl.phase) {
    case CleanupCursor::kMarkUnknown:
      ops.write_condition(passive[cl.idx], kCondUnknown);
      if (++cl.idx == slots) {
        cl.phase = CleanupCursor::kScan;
        cl.idx = 0;
        cl.scan_stage = 0;
      }
      return;
    case CleanupCursor::kScan: {
      const std::uint32_t pid = cl.idx / 2 + 1;
      const int slot = static_cast<int>(cl.idx % 2);
      bool advance = false;
      switch (cl.scan_stage) {
        case 0:
          cl.scan_node = ops.read_hazard(pid, slot);
          if (cl.scan_node == kNullNode) {
            advance = true;
          } else {
            cl.scan_stage = 1;
          }
          break;
        case 1:
          if (ops.read_condition(cl.scan_node) != kCondUnknown) {
            advance = true;
          } else {
            cl.scan_stage = 2;
          }
          break;
        case 2:
          if (ops.read_owner(cl.scan_node) != ctx.me) {
            advance = true;
          } else {
            cl.scan_stage = 3;
          }
          break;
        case 3:
          // The node may have migrated into an active pool since the first
          // condition test; it stays UNSAFE there until that epoch ends, so
          // a second UNKNOWN ensures it is still in a passive pool (ours).
          if (ops.read_condition(cl.scan_node) != kCondUnknown) {
            advance = true;
          } else {
            cl.scan_stage = 4;
          }
          break;
        default:
          ops.write_condition(cl.scan_node, kCondUnsafe);
          advance = true;
          break;
      }
      if (advance) {
        cl.scan_stage = 0;
        cl.scan_node = kNullNode;
        if (++cl.idx == 2 * n) {
          cl.phase = CleanupCursor::kPartition;
          cl.idx = 0;
          cl.part_left = 0;
        }
      }
      return;
    }
    case CleanupCursor::kPartition: {
      if (cl.scan_stage == 1) {
        ops.write_condition(passive[cl.idx], kCondSafe);
        cl.scan_stage = 0;
        if (++cl.idx == slots) cl.phase = CleanupCursor::kDoneWork;
        return;
      }
      if (ops.read_condition(passive[cl.idx]) == kCondUnknown) {
        cl.scan_stage = 1;  // reusable: mark SAFE next step, keep in place
      } else {
        std::swap(passive[cl.idx], passive[cl.part_left]);
        ++cl.part_left;
        if (++cl.idx == slots) cl.phase = CleanupCursor::kDoneWork;
      }
      return;
    }
    default:
      return;
  }
}

// Epoch boundary: adopt the scanned pool as active. The 3n sizing guarantees
// at least n SAFE nodes survive the scan.
inline void cleanup_finalize(ProcessContext& ctx, std::uint32_t n) {
  GME_CHECK(ctx.cleanup.phase == CleanupCursor::kDoneWork,
            "cleanup scan unfinished at epoch boundary");
  GME_CHECK(ctx.pool_size() - ctx.cleanup.part_left >= n,
            "fewer than n SAFE nodes at epoch boundary");
  ctx.marker = ctx.cleanup.part_left;
  ctx.which = 1 - ctx.which;
  ctx.passage_in_epoch = 0;
  ctx.cleanup = CleanupCursor{};
}

}  // namespace gme
