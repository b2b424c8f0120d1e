#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "gme/machine.hpp"
#include "gme/trace.hpp"
#include "gme/types.hpp"

namespace gme {

enum class OpKind : std::uint8_t { kRead, kWrite, kCas, kFaa };

enum class CellRole : std::uint8_t {
  kHead,
  kAnnounce,
  kHazard,
  kReady,
  kNodeField,
  kScratch,
};

// Disabled instrumentation; every call inlines to nothing.
struct NullHooks {
  static constexpr bool kEnabled = false;
  void on_op(OpKind, CellRole, std::uint32_t) {}
  void on_established(std::uint32_t, Word) {}
  void on_announce() {}
  void on_hazard_write(std::uint32_t, int, Word) {}
  void on_validated(std::uint32_t, int, Word) {}
  void on_acquire(std::uint32_t, Word) {}
  void on_retire(std::uint32_t, Word) {}
  void on_join(std::uint32_t, Word) {}
  void on_leave(std::uint32_t, Word) {}
  void on_wait_begin(std::uint32_t) {}
  void on_wait_end(std::uint32_t) {}
};

// Validated-hazard-hold audit shared by all workers. Each hazard slot has a
// single-writer shadow word packing (node id | validated | store ticket);
// retirement draws a ticket before the RETIRED store. Acquiring a node while
// some slot shows a validated hold stored before the node's retirement means
// the reclamation let a protected node back into circulation.
class HazardAudit {
 public:
  explicit HazardAudit(std::uint32_t processes, std::uint64_t max_nodes)
      : slots_(2 * processes), retire_seq_(max_nodes + 1) {
    for (auto& s : slots_) s.store(0, std::memory_order_relaxed);
    for (auto& r : retire_seq_) r.store(0, std::memory_order_relaxed);
  }

  void on_hazard_write(std::uint32_t pid, int slot, Word node) {
    const std::uint64_t seq = ticket_.fetch_add(1, std::memory_order_relaxed);
    shadow(pid, slot).store(pack(node, false, seq), std::memory_order_release);
  }

  void on_validated(std::uint32_t pid, int slot, Word node) {
    // A validated hold is bound to the node's incarnation at validation
    // time, not at store time: the slot owner may have parked between the
    // two while the node was recycled and republished, and the validation
    // succeeding against the new incarnation is legitimate. Re-ticket.
    auto& s = shadow(pid, slot);
    const std::uint64_t cur = s.load(std::memory_order_relaxed);
    if (unpack_node(cur) == node) {
      const std::uint64_t seq = ticket_.fetch_add(1, std::memory_order_relaxed);
      s.store(pack(node, true, seq), std::memory_order_release);
    }
  }

  void on_retire(Word node) {
    if (node < retire_seq_.size()) {
      retire_seq_[node].store(ticket_.fetch_add(1, std::memory_order_relaxed),
                              std::memory_order_release);
    }
  }

  void on_acquire(Word node) {
    if (node >= retire_seq_.size()) return;
    const std::uint64_t retired_at = retire_seq_[node].load(std::memory_order_acquire);
    if (retired_at == 0) return;  // never retired yet (initial pool fill)
    for (const auto& s : slots_) {
      const std::uint64_t v = s.load(std::memory_order_acquire);
      if (unpack_node(v) == node && (v & kValidatedBit) && unpack_seq(v) < retired_at) {
        violations_.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }

  std::uint64_t violations() const { return violations_.load(); }

 private:
  static constexpr std::uint64_t kValidatedBit = 1ull << 23;
  static constexpr std::uint64_t kNodeMask = kValidatedBit - 1;  // 23-bit node id

  static std::uint64_t pack(Word node, bool validated, std::uint64_t seq) {
    return (node & kNodeMask) | (validated ? kValidatedBit : 0) | (seq << 24);
  }
  static Word unpack_node(std::uint64_t v) { return v & kNodeMask; }
  static std::uint64_t unpack_seq(std::uint64_t v) { return v >> 24; }

  std::atomic<std::uint64_t>& shadow(std::uint32_t pid, int slot) {
    return slots_[(pid - 1) * 2 + slot];
  }

  std::atomic<std::uint64_t> ticket_{1};
  std::vector<std::atomic<std::uint64_t>> slots_;
  std::vector<std::atomic<std::uint64_t>> retire_seq_;
  std::atomic<std::uint64_t> violations_{0};
};

// Per-worker instrumentation: section op counts, iteration maxima, optional
// trace emission, DSM access classification, and the hazard audit hooks.
struct WorkerInstr {
  static constexpr bool kEnabled = true;

  std::uint32_t pid = 0;
  TraceRecorder* trace = nullptr;
  HazardAudit* audit = nullptr;

  // live section
  bool in_section = false;
  bool in_wait = false;
  std::uint32_t cur_instance = 0;
  Word cur_session = kSessionNone;
  std::uint64_t section_ops = 0;

  // aggregates
  std::uint64_t passages = 0;
  std::uint64_t max_entry_ops = 0;
  std::uint64_t min_entry_ops = ~0ull;
  std::uint64_t max_exit_ops = 0;
  std::uint32_t max_outer = 0;
  std::uint32_t max_inner = 0;
  std::uint32_t max_guard_reads = 0;
  std::uint32_t max_guard_cas = 0;
  std::uint64_t remote_wait_reads = 0;
  std::uint64_t wait_reads = 0;

  void section_begin(std::uint32_t instance, Word session) {
    in_section = true;
    cur_instance = instance;
    cur_session = session;
    section_ops = 0;
  }

  void reset_window() {
    max_entry_ops = 0;
    min_entry_ops = ~0ull;
    max_exit_ops = 0;
    max_outer = 0;
    max_inner = 0;
  }

  void entry_end(const PassageStats& st) {
    max_entry_ops = std::max(max_entry_ops, section_ops);
    min_entry_ops = std::min(min_entry_ops, section_ops);
    max_outer = std::max(max_outer, st.outer_iters);
    max_inner = std::max(max_inner, st.inner_spins);
    max_guard_reads = std::max(max_guard_reads, st.guard_reads_max);
    max_guard_cas = std::max(max_guard_cas, st.guard_cas_max);
    in_section = false;
    if (trace) trace->emit(pid, cur_instance, cur_session, EventKind::kEnterReturn);
  }

  void exit_begin(std::uint32_t instance) {
    section_begin(instance, kSessionNone);
    if (trace) trace->emit(pid, instance, kSessionNone, EventKind::kExitCall);
  }

  void exit_end(const PassageStats& st) {
    max_exit_ops = std::max(max_exit_ops, section_ops);
    max_guard_reads = std::max(max_guard_reads, st.guard_reads_max);
    max_guard_cas = std::max(max_guard_cas, st.guard_cas_max);
    in_section = false;
    ++passages;
  }

  void on_op(OpKind kind, CellRole role, std::uint32_t home) {
    ++section_ops;
    if (in_wait && kind == OpKind::kRead) {
      ++wait_reads;
      if (!(role == CellRole::kReady && home == pid)) ++remote_wait_reads;
    }
  }

  void on_established(std::uint32_t instance, Word session) {
    if (trace) trace->emit(pid, instance, session, EventKind::kSessionEstablished);
  }
  void on_announce() {
    if (trace) trace->emit(pid, cur_instance, cur_session, EventKind::kAnnounce);
  }
  void on_hazard_write(std::uint32_t p, int slot, Word node) {
    if (audit) audit->on_hazard_write(p, slot, node);
  }
  void on_validated(std::uint32_t p, int slot, Word node) {
    if (audit) audit->on_validated(p, slot, node);
  }
  void on_acquire(std::uint32_t, Word node) {
    if (audit) audit->on_acquire(node);
  }
  void on_retire(std::uint32_t, Word node) {
    if (audit) audit->on_retire(node);
    if (trace) trace->emit(pid, cur_instance, cur_session, EventKind::kRetire);
  }
  void on_join(std::uint32_t, Word) {}
  void on_leave(std::uint32_t, Word) {}
  void on_wait_begin(std::uint32_t) { in_wait = true; }
  void on_wait_end(std::uint32_t) { in_wait = false; }
};

}  // namespace gme
