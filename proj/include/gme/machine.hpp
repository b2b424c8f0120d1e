#pragma once

#include <algorithm>

#include "gme/context.hpp"
#include "gme/state_flags.hpp"
#include "gme/steps.hpp"
#include "gme/types.hpp"

namespace gme {

enum class Step : std::uint8_t {
  kProgress,  // made progress (one cell op or a private transition)
  kSpin,      // busy-wait iteration; a native driver may back off
  kDone,      // section complete
};

// Cleanup budget per passage, independent of n. 40(n-1) >= 19n+1 for n >= 2
// and 40 >= 19n+1 for n = 1, so the scan always completes strictly before
// the epoch's last passage has to switch pools.
inline constexpr std::uint32_t kCleanupSliceSteps = 40;

// Per-passage control-flow counters. Not part of the algorithm state; the
// exploration hash excludes them so spin loops collapse to one state.
struct PassageStats {
  std::uint32_t outer_iters = 0;       // entry loop iterations
  std::uint32_t inner_spins = 0;       // wait-loop bodies executed (not-yet checks)
  std::uint32_t readhead_iters = 0;    // total ReadHead loop iterations (entry)
  std::uint32_t guard_reads_max = 0;   // per-invocation maxima of SetGuardFlag
  std::uint32_t guard_cas_max = 0;
};

// One entry or exit section, stepped one shared-cell operation at a time.
// The same body serves the native and simulated backends; `Ops` supplies the
// cell operations plus a few instrumentation seams (no-ops when disabled).
struct PassageMachine {
  enum class Pc : std::uint8_t {
    kIdle = 0,
    // GetNewNode
    kGnnCondRead,
    kGnnCondWrite,
    kGnnOwner,
    kGnnInstance,
    kGnnSession,
    kGnnSize,
    kGnnNext,
    kGnnPrev,
    kGnnState,
    kGnnNumber,
    kGnnAnnounce,
    // entry loop
    kEnReadHead,
    kEnReadSession,
    kEnReadState1,
    kEnFaaInc,
    kEnReadState2,
    kEnFaaDec,
    kEnGuardConflict,
    kEnVacant,
    kEnSpin,
    kEnReadyStore,
    kEnReadyCheck,
    kEnReadyClear,
    kEnReadySpin,
    kEnTestHead,
    // leader return path
    kEnLeaderPrev,
    kEnLeaderNotify,
    // AppendNextNode / SelectNextNode
    kApMine,
    kApNumber,
    kApHelpee,
    kApHelpeeHazard,
    kApHelpeeRevalidate,
    kApHelpeeInstance,
    kApHelpeeState,
    kApCasNext,
    kApReadNext,
    kApSuccHazard,
    kApTestHead,
    kApWritePrev,
    kApReadNumber,
    kApWriteNumber,
    kApAdvance,
    kApNotifyOwner,
    kApNotifyCas,
    // RetireNode (+ reclaim insertions + cleanup slice)
    kRtAnnounce,
    kRtOwner,
    kRtMark,
    kRtCleanup,
    kRtEpochEnd,
    kHpClear0,
    kHpClear1,
    // exit section
    kXReadHead,
    kXReadOwner,
    kXGuard,
    kXFaa,
    kXVacant,
    kXNotify,
    kDone,
  };

  // Fixed for the passage.
  std::uint32_t me = 0;
  std::uint32_t n = 0;
  Features feat{};
  std::uint32_t instance = 0;
  Word session = kSessionNone;

  Pc pc = Pc::kIdle;
  Pc after_retire = Pc::kDone;

  // Locals live across steps.
  Word mynode = kNullNode;
  Word current = kNullNode;
  Word helpee = kNullNode;
  Word candidate = kNullNode;
  Word successor = kNullNode;
  Word retire_target = kNullNode;
  Word leader_prev = kNullNode;
  Word help_idx = 0;
  std::uint32_t notify_i = 0;
  std::uint32_t slice_left = 0;

  GuardFlagStep guard{};
  VacantFlagStep vacant{};
  ReadHeadStep rh{};

  PassageStats stats{};

  bool done() const { return pc == Pc::kDone; }

  void begin_enter(std::uint32_t pid, const SystemConfig& cfg, std::uint32_t inst,
                   Word sess) {
    *this = PassageMachine{};
    me = pid;
    n = cfg.processes;
    feat = cfg.features;
    instance = inst;
    session = sess;
    pc = feat.reclaim ? Pc::kGnnCondRead : Pc::kGnnOwner;
  }

  void begin_exit(std::uint32_t pid, const SystemConfig& cfg, std::uint32_t inst) {
    *this = PassageMachine{};
    me = pid;
    n = cfg.processes;
    feat = cfg.features;
    instance = inst;
    rh.reset();
    pc = Pc::kXReadHead;
  }

  // Exploration hash: program counter plus live locals; stats excluded.
  template <class H>
  void hash_into(H& h) const {
    h(static_cast<Word>(pc));
    h(static_cast<Word>(after_retire));
    h((static_cast<Word>(me) << 32) | n);
    h((Word(feat.helping) << 2) | (Word(feat.reclaim) << 1) | Word(feat.dsm));
    h(instance);
    h(session);
    h(mynode);
    h(current);
    h(helpee);
    h(candidate);
    h(successor);
    h(retire_target);
    h(leader_prev);
    h(help_idx);
    h(notify_i);
    h(slice_left);
    h((Word(guard.stage) << 32) | guard.observed);
    h((Word(vacant.stage) << 33) | (Word(vacant.result) << 32) | vacant.observed);
    h((Word(rh.stage) << 32) ^ rh.snapshot);
  }

  template <class Ops>
  Step step(Ops& ops, ProcessContext& ctx) {
    switch (pc) {
      // ---- GetNewNode -----------------------------------------------------
      case Pc::kGnnCondRead: {
        GME_CHECK(ctx.marker < ctx.pool_size(), "active pool exhausted");
        mynode = ctx.pool[ctx.which][ctx.marker];
        const Word cond = ops.read_condition(mynode);
        GME_CHECK(cond == kCondSafe, "acquired pool node is not SAFE");
        ops.note_acquire(me, mynode);
        pc = Pc::kGnnCondWrite;
        return Step::kProgress;
      }
      case Pc::kGnnCondWrite:
        ops.write_condition(mynode, kCondUnsafe);
        pc = Pc::kGnnOwner;
        return Step::kProgress;
      case Pc::kGnnOwner:
        if (!feat.reclaim) mynode = ops.allocate_node(me);
        ops.write_owner(mynode, me);
        pc = Pc::kGnnInstance;
        return Step::kProgress;
      case Pc::kGnnInstance:
        ops.write_instance(mynode, instance);
        pc = Pc::kGnnSession;
        return Step::kProgress;
      case Pc::kGnnSession:
        ops.write_session(mynode, session);
        pc = Pc::kGnnSize;
        return Step::kProgress;
      case Pc::kGnnSize:
        ops.write_size(mynode, 1);
        pc = Pc::kGnnNext;
        return Step::kProgress;
      case Pc::kGnnNext:
        ops.write_next(mynode, kNullNode);
        pc = Pc::kGnnPrev;
        return Step::kProgress;
      case Pc::kGnnPrev:
        ops.write_prev(mynode, kNullNode);
        pc = Pc::kGnnState;
        return Step::kProgress;
      case Pc::kGnnState:
        ops.write_state(mynode, 0);
        pc = Pc::kGnnNumber;
        return Step::kProgress;
      case Pc::kGnnNumber:
        ops.write_number(mynode, 0);
        pc = Pc::kGnnAnnounce;
        return Step::kProgress;
      case Pc::kGnnAnnounce:
        // Publication is last: nobody can see the node before it is whole.
        ops.write_announce(me, mynode);
        rh.reset();
        pc = Pc::kEnReadHead;
        return Step::kProgress;

      // ---- entry loop ------------------------------------------------------
      case Pc::kEnReadHead:
        if (!rh.step(ops, me, instance, feat.reclaim)) return Step::kProgress;
        current = rh.snapshot;
        stats.readhead_iters += rh.iterations;
        rh.reset();
        ++stats.outer_iters;
        if (current == mynode) {
          // Helped onto the list: enter as leader, retire the predecessor.
          pc = Pc::kEnLeaderPrev;
        } else {
          pc = Pc::kEnReadSession;
        }
        return Step::kProgress;
      case Pc::kEnLeaderPrev:
        ops.note_join(me, mynode);
        leader_prev = ops.read_prev(mynode);
        if (feat.dsm) {
          notify_i = 1;
          pc = Pc::kEnLeaderNotify;
        } else {
          retire_target = leader_prev;
          after_retire = feat.reclaim ? Pc::kHpClear0 : Pc::kDone;
          pc = Pc::kRtAnnounce;
        }
        return Step::kProgress;
      case Pc::kEnLeaderNotify:
        // Leader of the new session: wake everyone who waited on the
        // predecessor's session.
        ops.cas_ready(notify_i, leader_prev, kNullNode);
        if (++notify_i > n) {
          retire_target = leader_prev;
          after_retire = feat.reclaim ? Pc::kHpClear0 : Pc::kDone;
          pc = Pc::kRtAnnounce;
        }
        return Step::kProgress;
      case Pc::kEnReadSession:
        pc = (ops.read_session(current) == session) ? Pc::kEnReadState1
                                                    : Pc::kEnGuardConflict;
        if (pc == Pc::kEnGuardConflict) guard.reset();
        return Step::kProgress;
      case Pc::kEnReadState1:
        if (!is_closed(ops.read_state(current))) {
          pc = Pc::kEnFaaInc;
        } else {
          pc = wait_entry();
        }
        return Step::kProgress;
      case Pc::kEnFaaInc:
        ops.faa_size(current, 1);
        pc = Pc::kEnReadState2;
        return Step::kProgress;
      case Pc::kEnReadState2:
        if (!is_closed(ops.read_state(current))) {
          // Joined as a follower; own node is no longer needed.
          ops.note_join(me, current);
          retire_target = mynode;
          after_retire = feat.reclaim ? Pc::kHpClear0 : Pc::kDone;
          pc = Pc::kRtAnnounce;
        } else {
          pc = Pc::kEnFaaDec;
        }
        return Step::kProgress;
      case Pc::kEnFaaDec:
        ops.faa_size(current, -1);
        vacant.reset();
        pc = Pc::kEnVacant;
        return Step::kProgress;
      case Pc::kEnGuardConflict:
        if (!guard.step(ops, current, kConflict)) return Step::kProgress;
        note_guard_stats();
        vacant.reset();
        pc = Pc::kEnVacant;
        return Step::kProgress;
      case Pc::kEnVacant:
        if (!vacant.step(ops, current)) return Step::kProgress;
        pc = wait_entry();
        return Step::kProgress;

      // ---- wait until the session adjourns ---------------------------------
      case Pc::kEnSpin:
        if (is_adjourned(ops.read_state(current))) {
          pc = Pc::kEnTestHead;
          return Step::kProgress;
        }
        ++stats.inner_spins;
        return Step::kSpin;
      case Pc::kEnReadyStore:
        ops.write_ready(me, current);
        pc = Pc::kEnReadyCheck;
        return Step::kProgress;
      case Pc::kEnReadyCheck:
        if (is_adjourned(ops.read_state(current))) {
          pc = Pc::kEnReadyClear;
        } else {
          ops.begin_wait(me);
          pc = Pc::kEnReadySpin;
        }
        return Step::kProgress;
      case Pc::kEnReadyClear:
        // Session already adjourned; no need to spin.
        ops.write_ready(me, kNullNode);
        ops.begin_wait(me);
        pc = Pc::kEnReadySpin;
        return Step::kProgress;
      case Pc::kEnReadySpin:
        if (ops.read_ready(me) == kNullNode) {
          ops.end_wait(me);
          pc = Pc::kEnTestHead;
          return Step::kProgress;
        }
        ++stats.inner_spins;
        return Step::kSpin;

      case Pc::kEnTestHead:
        if (ops.read_head(instance) != current) {
          rh.reset();
          pc = Pc::kEnReadHead;
        } else {
          pc = Pc::kApMine;
        }
        return Step::kProgress;

      // ---- AppendNextNode ---------------------------------------------------
      case Pc::kApMine:
        candidate = ops.read_announce(me);
        pc = feat.helping ? Pc::kApNumber : Pc::kApCasNext;
        return Step::kProgress;
      case Pc::kApNumber:
        help_idx = ops.read_number(current);
        GME_CHECK(help_idx >= 1 && help_idx <= n, "help index out of range");
        pc = Pc::kApHelpee;
        return Step::kProgress;
      case Pc::kApHelpee:
        helpee = ops.read_announce(static_cast<std::uint32_t>(help_idx));
        pc = feat.reclaim ? Pc::kApHelpeeHazard : Pc::kApHelpeeInstance;
        if (!feat.reclaim && helpee == kNullNode) pc = Pc::kApCasNext;
        return Step::kProgress;
      case Pc::kApHelpeeHazard:
        ops.write_hazard(me, 1, helpee);
        pc = Pc::kApHelpeeRevalidate;
        return Step::kProgress;
      case Pc::kApHelpeeRevalidate:
        if (ops.read_announce(static_cast<std::uint32_t>(help_idx)) != helpee ||
            helpee == kNullNode) {
          pc = Pc::kApCasNext;  // request already fulfilled (or none)
        } else {
          ops.note_validated(me, 1, helpee);
          pc = Pc::kApHelpeeInstance;
        }
        return Step::kProgress;
      case Pc::kApHelpeeInstance:
        pc = (ops.read_instance(helpee) == instance) ? Pc::kApHelpeeState
                                                     : Pc::kApCasNext;
        return Step::kProgress;
      case Pc::kApHelpeeState:
        if (!is_retired(ops.read_state(helpee))) candidate = helpee;
        pc = Pc::kApCasNext;
        return Step::kProgress;
      case Pc::kApCasNext:
        // Whatever the outcome, the current head now has a successor.
        ops.cas_next(current, kNullNode, candidate);
        pc = Pc::kApReadNext;
        return Step::kProgress;
      case Pc::kApReadNext:
        successor = ops.read_next(current);
        pc = feat.reclaim ? Pc::kApSuccHazard : Pc::kApTestHead;
        return Step::kProgress;
      case Pc::kApSuccHazard:
        ops.write_hazard(me, 1, successor);
        pc = Pc::kApTestHead;
        return Step::kProgress;
      case Pc::kApTestHead:
        if (ops.read_head(instance) != current) {
          // Append already completed by others.
          rh.reset();
          pc = Pc::kEnReadHead;
        } else {
          if (feat.reclaim) ops.note_validated(me, 1, successor);
          pc = Pc::kApWritePrev;
        }
        return Step::kProgress;
      case Pc::kApWritePrev:
        // Concurrent helpers write identical values here and below.
        ops.write_prev(successor, current);
        pc = Pc::kApReadNumber;
        return Step::kProgress;
      case Pc::kApReadNumber:
        help_idx = ops.read_number(current);
        pc = Pc::kApWriteNumber;
        return Step::kProgress;
      case Pc::kApWriteNumber:
        ops.write_number(successor, next_help_index(help_idx, n));
        pc = Pc::kApAdvance;
        return Step::kProgress;
      case Pc::kApAdvance:
        ops.cas_head(instance, current, successor);
        if (feat.dsm) {
          pc = Pc::kApNotifyOwner;
        } else {
          rh.reset();
          pc = Pc::kEnReadHead;
        }
        return Step::kProgress;
      case Pc::kApNotifyOwner:
        help_idx = ops.read_owner(successor);
        pc = Pc::kApNotifyCas;
        return Step::kProgress;
      case Pc::kApNotifyCas:
        // The successor's owner leads the next session; stop its spin on the
        // session we just buried.
        GME_CHECK(help_idx >= 1 && help_idx <= n, "successor owner out of range");
        ops.cas_ready(static_cast<std::uint32_t>(help_idx), current, kNullNode);
        rh.reset();
        pc = Pc::kEnReadHead;
        return Step::kProgress;

      // ---- RetireNode -------------------------------------------------------
      case Pc::kRtAnnounce:
        ops.write_announce(me, kNullNode);
        pc = feat.reclaim ? Pc::kRtOwner : Pc::kRtMark;
        return Step::kProgress;
      case Pc::kRtOwner:
        ops.write_owner(retire_target, me);
        ctx.pool[ctx.which][ctx.marker] = retire_target;
        ++ctx.marker;
        ++ctx.passage_in_epoch;
        slice_left = kCleanupSliceSteps;
        pc = Pc::kRtMark;
        return Step::kProgress;
      case Pc::kRtMark:
        ops.note_retire(me, retire_target);
        ops.write_state(retire_target, kAllFlags);
        pc = feat.reclaim ? Pc::kRtCleanup : after_retire;
        return done_or_progress();
      case Pc::kRtCleanup:
        if (slice_left > 0 && ctx.cleanup.phase != CleanupCursor::kDoneWork) {
          cleanup_step(ops, ctx, n);
          --slice_left;
          return Step::kProgress;
        }
        pc = Pc::kRtEpochEnd;
        return Step::kProgress;
      case Pc::kRtEpochEnd:
        if (ctx.passage_in_epoch == n) cleanup_finalize(ctx, n);
        pc = after_retire;
        return done_or_progress();
      case Pc::kHpClear0:
        ops.write_hazard(me, 0, kNullNode);
        pc = Pc::kHpClear1;
        return Step::kProgress;
      case Pc::kHpClear1:
        ops.write_hazard(me, 1, kNullNode);
        pc = Pc::kDone;
        return Step::kDone;

      // ---- exit section -----------------------------------------------------
      case Pc::kXReadHead:
        if (!rh.step(ops, me, instance, feat.reclaim)) return Step::kProgress;
        current = rh.snapshot;
        ops.note_leave(me, current);
        pc = Pc::kXReadOwner;
        return Step::kProgress;
      case Pc::kXReadOwner:
        if (ops.read_owner(current) == me) {
          guard.reset();
          pc = Pc::kXGuard;
        } else {
          pc = Pc::kXFaa;
        }
        return Step::kProgress;
      case Pc::kXGuard:
        if (!guard.step(ops, current, kLeaderless)) return Step::kProgress;
        note_guard_stats();
        pc = Pc::kXFaa;
        return Step::kProgress;
      case Pc::kXFaa:
        ops.faa_size(current, -1);
        vacant.reset();
        pc = Pc::kXVacant;
        return Step::kProgress;
      case Pc::kXVacant:
        if (!vacant.step(ops, current)) return Step::kProgress;
        if (feat.dsm && vacant.result) {
          notify_i = 1;
          pc = Pc::kXNotify;
          return Step::kProgress;
        }
        pc = feat.reclaim ? Pc::kHpClear0 : Pc::kDone;
        return done_or_progress();
      case Pc::kXNotify:
        // Last process out adjourned the session: broadcast.
        ops.cas_ready(notify_i, current, kNullNode);
        if (++notify_i > n) {
          pc = feat.reclaim ? Pc::kHpClear0 : Pc::kDone;
          return done_or_progress();
        }
        return Step::kProgress;

      case Pc::kIdle:
      case Pc::kDone:
      default:
        return Step::kDone;
    }
  }

 private:
  Pc wait_entry() {
    if (feat.dsm) return Pc::kEnReadyStore;
    return Pc::kEnSpin;
  }

  Step done_or_progress() const {
    return pc == Pc::kDone ? Step::kDone : Step::kProgress;
  }

  void note_guard_stats() {
    stats.guard_reads_max = std::max(stats.guard_reads_max, guard.reads);
    stats.guard_cas_max = std::max(stats.guard_cas_max, guard.cas_tries);
  }
};

}  // namespace gme
