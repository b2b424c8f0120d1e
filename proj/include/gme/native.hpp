#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif
#include <sched.h>

#include "gme/context.hpp"
#include "gme/instrumentation.hpp"
#include "gme/machine.hpp"
#include "gme/types.hpp"

namespace gme {

inline void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#else
  std::atomic_signal_fence(std::memory_order_seq_cst);
#endif
}

// Spin driver: pause briefly, then yield, then park in short sleeps.
// Oversubscribed hosts make no progress otherwise, and a crowd of yielding
// spinners starves the one thread that could unblock them.
struct SpinBackoff {
  std::uint32_t spins = 0;
  void pause() {
    ++spins;
    if (spins < 64) {
      cpu_relax();
    } else {
      sched_yield();
    }
  }
  void reset() { spins = 0; }
};

namespace detail {

struct alignas(64) PaddedAtomic {
  std::atomic<Word> v{0};
};

// One list node. All fields accessed concurrently are word-sized atomics with
// sequentially consistent operations (the proof model's ordering).
struct alignas(128) NodeCells {
  std::atomic<Word> state{0};
  std::atomic<Word> size{0};
  std::atomic<Word> next{0};
  std::atomic<Word> owner{0};
  std::atomic<Word> condition{0};
  std::atomic<Word> prev{0};
  std::atomic<Word> number{0};
  std::atomic<Word> session{0};
  std::atomic<Word> instance{0};
};

// Append-only node table. Node ids are 1-based; segments are never moved, so
// references stay valid while threads run. The non-reclaiming build grows it
// per request; the reclaiming build fills it once at init.
class NodeTable {
 public:
  static constexpr std::uint32_t kSegmentBits = 12;
  static constexpr std::uint32_t kSegmentSize = 1u << kSegmentBits;

  NodeCells& operator[](Word ref) {
    const std::uint64_t id = ref - 1;
    return segments_[id >> kSegmentBits][id & (kSegmentSize - 1)];
  }

  Word allocate() {
    const std::uint64_t id = next_.fetch_add(1, std::memory_order_relaxed);
    const std::size_t seg = id >> kSegmentBits;
    if (seg >= ready_segments_.load(std::memory_order_acquire)) grow(seg);
    return id + 1;
  }

  std::uint64_t count() const { return next_.load(std::memory_order_relaxed); }

 private:
  void grow(std::size_t seg) {
    std::lock_guard<std::mutex> lock(grow_mutex_);
    while (ready_segments_.load(std::memory_order_acquire) <= seg) {
      const std::size_t at = ready_segments_.load(std::memory_order_relaxed);
      // The segment directory is fixed-size so readers never race a resize.
      GME_CHECK(at < segments_.size(), "node table capacity exceeded");
      segments_[at] = std::make_unique<NodeCells[]>(kSegmentSize);
      ready_segments_.store(at + 1, std::memory_order_release);
    }
  }

  std::vector<std::unique_ptr<NodeCells[]>> segments_{4096};
  std::atomic<std::size_t> ready_segments_{0};
  std::atomic<std::uint64_t> next_{0};
  std::mutex grow_mutex_;
};

}  // namespace detail

class GmeSystem;

// Cell operations over native atomics. Hooks calls compile away when
// instrumentation is off.
template <class Hooks>
class NativeOps {
 public:
  NativeOps(GmeSystem& sys, Hooks& hooks) : sys_(sys), hooks_(hooks) {}

  // --- heads ---
  Word read_head(std::uint32_t instance);
  bool cas_head(std::uint32_t instance, Word expect, Word next);
  // --- announce ---
  Word read_announce(std::uint32_t pid);
  void write_announce(std::uint32_t pid, Word v);
  // --- hazard slots ---
  Word read_hazard(std::uint32_t pid, int slot);
  void write_hazard(std::uint32_t pid, int slot, Word v);
  // --- ready slots ---
  Word read_ready(std::uint32_t pid);
  void write_ready(std::uint32_t pid, Word v);
  bool cas_ready(std::uint32_t pid, Word expect, Word next);
  // --- node fields ---
  Word read_state(Word node);
  void write_state(Word node, Word v);
  bool cas_state(Word node, Word expect, Word next);
  Word read_size(Word node);
  void write_size(Word node, Word v);
  Word faa_size(Word node, std::int64_t delta);
  Word read_next(Word node);
  void write_next(Word node, Word v);
  bool cas_next(Word node, Word expect, Word next);
  Word read_prev(Word node);
  void write_prev(Word node, Word v);
  Word read_number(Word node);
  void write_number(Word node, Word v);
  Word read_owner(Word node);
  void write_owner(Word node, Word v);
  Word read_session(Word node);
  void write_session(Word node, Word v);
  Word read_instance(Word node);
  void write_instance(Word node, Word v);
  Word read_condition(Word node);
  void write_condition(Word node, Word v);
  // --- allocation (non-reclaiming build) ---
  Word allocate_node(std::uint32_t pid);
  // --- instrumentation seams ---
  void note_acquire(std::uint32_t pid, Word node) { hooks_.on_acquire(pid, node); }
  void note_validated(std::uint32_t pid, int slot, Word node) {
    hooks_.on_validated(pid, slot, node);
  }
  void note_retire(std::uint32_t pid, Word node) { hooks_.on_retire(pid, node); }
  void note_join(std::uint32_t pid, Word node) { hooks_.on_join(pid, node); }
  void note_leave(std::uint32_t pid, Word node) { hooks_.on_leave(pid, node); }
  void begin_wait(std::uint32_t pid) { hooks_.on_wait_begin(pid); }
  void end_wait(std::uint32_t pid) { hooks_.on_wait_end(pid); }

 private:
  GmeSystem& sys_;
  Hooks& hooks_;
};

// One GME system: m instances sharing n process contexts and one node table.
// Feature switches select the helping, reclaiming, and DSM variants.
class GmeSystem {
 public:
  explicit GmeSystem(SystemConfig cfg) : cfg_(cfg) {
    if (cfg.processes == 0) throw std::invalid_argument("process count must be >= 1");
    if (cfg.instances == 0) throw std::invalid_argument("instance count must be >= 1");
    const std::uint32_t n = cfg.processes;
    const std::uint32_t m = cfg.instances;
    heads_ = std::vector<detail::PaddedAtomic>(m);
    announce_ = std::vector<detail::PaddedAtomic>(n);
    hazard_ = std::vector<detail::PaddedAtomic>(2 * n);
    ready_ = std::vector<detail::PaddedAtomic>(n);
    contexts_.resize(n + 1);
    for (std::uint32_t p = 1; p <= n; ++p) contexts_[p].me = p;

    // Dummy heads: an already-retired-looking session nobody can join. The
    // LEADERLESS guard is up; the first conflicting request closes it.
    for (std::uint32_t i = 1; i <= m; ++i) {
      const Word ref = nodes_.allocate();
      detail::NodeCells& d = nodes_[ref];
      d.state.store(kLeaderless);
      d.size.store(0);
      d.next.store(kNullNode);
      d.session.store(kSessionNone);
      d.instance.store(i);
      d.number.store(n);
      d.owner.store(kOwnerInstance);
      d.prev.store(kNullNode);
      d.condition.store(kCondUnsafe);
      heads_[i - 1].v.store(ref);
    }

    if (cfg.features.reclaim) {
      const std::uint32_t slots = pool_slots(n);
      for (std::uint32_t p = 1; p <= n; ++p) {
        ProcessContext& ctx = contexts_[p];
        for (int w = 0; w < 2; ++w) {
          ctx.pool[w].resize(slots);
          for (std::uint32_t k = 0; k < slots; ++k) {
            const Word ref = nodes_.allocate();
            detail::NodeCells& c = nodes_[ref];
            c.owner.store(p);
            c.condition.store(kCondSafe);
            ctx.pool[w][k] = ref;
          }
        }
      }
    }
    baseline_allocations_ = nodes_.count();
  }

  const SystemConfig& config() const { return cfg_; }
  ProcessContext& context(std::uint32_t pid) { return contexts_.at(pid); }

  template <class Hooks>
  void enter(ProcessContext& ctx, std::uint32_t instance, Word session, Hooks& hooks) {
    check_request(instance, session);
    PassageMachine m;
    m.begin_enter(ctx.me, cfg_, instance, session);
    if constexpr (Hooks::kEnabled) hooks.section_begin(instance, session);
    drive(m, ctx, hooks);
    if constexpr (Hooks::kEnabled) hooks.entry_end(m.stats);
  }

  template <class Hooks>
  void exit(ProcessContext& ctx, std::uint32_t instance, Hooks& hooks) {
    check_instance(instance);
    PassageMachine m;
    m.begin_exit(ctx.me, cfg_, instance);
    if constexpr (Hooks::kEnabled) hooks.exit_begin(instance);
    drive(m, ctx, hooks);
    if constexpr (Hooks::kEnabled) hooks.exit_end(m.stats);
  }

  void enter(ProcessContext& ctx, std::uint32_t instance, Word session) {
    NullHooks h;
    enter(ctx, instance, session, h);
  }
  void exit(ProcessContext& ctx, std::uint32_t instance) {
    NullHooks h;
    exit(ctx, instance, h);
  }

  std::uint64_t node_count() const { return nodes_.count(); }
  std::uint64_t allocations_since_init() const {
    return nodes_.count() - baseline_allocations_;
  }

  // Read-side peeks for audits and tests.
  Word peek_hazard(std::uint32_t pid, int slot) const {
    return hazard_[(pid - 1) * 2 + slot].v.load();
  }
  Word peek_head(std::uint32_t instance) const {
    return heads_[instance - 1].v.load();
  }
  Word peek_node_field(Word node, int field) const {
    detail::NodeCells& n = const_cast<detail::NodeTable&>(nodes_)[node];
    switch (field) {
      case 0: return n.state.load();
      case 1: return n.size.load();
      case 2: return n.next.load();
      case 3: return n.owner.load();
      case 4: return n.condition.load();
      case 5: return n.prev.load();
      case 6: return n.number.load();
      case 7: return n.session.load();
      default: return n.instance.load();
    }
  }

  // Quiescent-state audit: every node sits in exactly one pool or is the
  // current head of exactly one instance. Call only when no passage runs.
  bool pool_membership_ok() const {
    std::vector<std::uint32_t> seen(nodes_.count() + 1, 0);
    for (std::uint32_t i = 1; i <= cfg_.instances; ++i) {
      const Word h = heads_[i - 1].v.load();
      if (h == kNullNode || h > nodes_.count()) return false;
      ++seen[h];
    }
    for (std::uint32_t p = 1; p <= cfg_.processes; ++p) {
      for (int w = 0; w < 2; ++w) {
        for (Word ref : contexts_[p].pool[w]) {
          if (ref == kNullNode || ref > nodes_.count()) return false;
          ++seen[ref];
        }
      }
    }
    for (Word ref = 1; ref <= nodes_.count(); ++ref) {
      if (seen[ref] != 1) return false;
    }
    return true;
  }

 private:
  template <class Hooks>
  friend class NativeOps;

  template <class Hooks>
  void drive(PassageMachine& m, ProcessContext& ctx, Hooks& hooks) {
    NativeOps<Hooks> ops(*this, hooks);
    SpinBackoff backoff;
    for (;;) {
      const Step s = m.step(ops, ctx);
      if (s == Step::kDone) return;
      if (s == Step::kSpin) {
        backoff.pause();
      } else {
        backoff.reset();
      }
    }
  }

  void check_instance(std::uint32_t instance) const {
    if (instance == 0 || instance > cfg_.instances) {
      throw std::invalid_argument("instance id out of range");
    }
  }
  void check_request(std::uint32_t instance, Word session) const {
    check_instance(instance);
    if (session == kSessionNone) {
      throw std::invalid_argument("session id 0 is reserved");
    }
  }

  SystemConfig cfg_;
  std::vector<detail::PaddedAtomic> heads_;
  std::vector<detail::PaddedAtomic> announce_;
  std::vector<detail::PaddedAtomic> hazard_;
  std::vector<detail::PaddedAtomic> ready_;
  std::vector<ProcessContext> contexts_;
  detail::NodeTable nodes_;
  std::uint64_t baseline_allocations_ = 0;
};

// --- NativeOps inline implementations ---------------------------------------

template <class Hooks>
inline Word NativeOps<Hooks>::read_head(std::uint32_t instance) {
  hooks_.on_op(OpKind::kRead, CellRole::kHead, 0);
  return sys_.heads_[instance - 1].v.load();
}
template <class Hooks>
inline bool NativeOps<Hooks>::cas_head(std::uint32_t instance, Word expect, Word next) {
  hooks_.on_op(OpKind::kCas, CellRole::kHead, 0);
  const bool ok = sys_.heads_[instance - 1].v.compare_exchange_strong(expect, next);
  if (ok) {
    if constexpr (Hooks::kEnabled) {
      hooks_.on_established(instance, sys_.nodes_[next].session.load());
    }
  }
  return ok;
}
template <class Hooks>
inline Word NativeOps<Hooks>::read_announce(std::uint32_t pid) {
  hooks_.on_op(OpKind::kRead, CellRole::kAnnounce, pid);
  return sys_.announce_[pid - 1].v.load();
}
template <class Hooks>
inline void NativeOps<Hooks>::write_announce(std::uint32_t pid, Word v) {
  hooks_.on_op(OpKind::kWrite, CellRole::kAnnounce, pid);
  sys_.announce_[pid - 1].v.store(v);
  if (v != kNullNode) hooks_.on_announce();
}
template <class Hooks>
inline Word NativeOps<Hooks>::read_hazard(std::uint32_t pid, int slot) {
  hooks_.on_op(OpKind::kRead, CellRole::kHazard, pid);
  return sys_.hazard_[(pid - 1) * 2 + slot].v.load();
}
template <class Hooks>
inline void NativeOps<Hooks>::write_hazard(std::uint32_t pid, int slot, Word v) {
  hooks_.on_op(OpKind::kWrite, CellRole::kHazard, pid);
  // Audit shadow first: if the writer parks between the two stores, the
  // shadow must not keep incriminating the old hold (overwriting the slot is
  // how a hold ends; announcing the overwrite already ends it).
  hooks_.on_hazard_write(pid, slot, v);
  sys_.hazard_[(pid - 1) * 2 + slot].v.store(v);
}
template <class Hooks>
inline Word NativeOps<Hooks>::read_ready(std::uint32_t pid) {
  hooks_.on_op(OpKind::kRead, CellRole::kReady, pid);
  return sys_.ready_[pid - 1].v.load();
}
template <class Hooks>
inline void NativeOps<Hooks>::write_ready(std::uint32_t pid, Word v) {
  hooks_.on_op(OpKind::kWrite, CellRole::kReady, pid);
  sys_.ready_[pid - 1].v.store(v);
}
template <class Hooks>
inline bool NativeOps<Hooks>::cas_ready(std::uint32_t pid, Word expect, Word next) {
  hooks_.on_op(OpKind::kCas, CellRole::kReady, pid);
  return sys_.ready_[pid - 1].v.compare_exchange_strong(expect, next);
}

#define GME_NATIVE_NODE_FIELD(name)                                          \
  template <class Hooks>                                                     \
  inline Word NativeOps<Hooks>::read_##name(Word node) {                     \
    hooks_.on_op(OpKind::kRead, CellRole::kNodeField, 0);                    \
    return sys_.nodes_[node].name.load();                                    \
  }                                                                          \
  template <class Hooks>                                                     \
  inline void NativeOps<Hooks>::write_##name(Word node, Word v) {            \
    hooks_.on_op(OpKind::kWrite, CellRole::kNodeField, 0);                   \
    sys_.nodes_[node].name.store(v);                                         \
  }

GME_NATIVE_NODE_FIELD(state)
GME_NATIVE_NODE_FIELD(size)
GME_NATIVE_NODE_FIELD(next)
GME_NATIVE_NODE_FIELD(prev)
GME_NATIVE_NODE_FIELD(number)
GME_NATIVE_NODE_FIELD(owner)
GME_NATIVE_NODE_FIELD(session)
GME_NATIVE_NODE_FIELD(instance)
GME_NATIVE_NODE_FIELD(condition)
#undef GME_NATIVE_NODE_FIELD

template <class Hooks>
inline bool NativeOps<Hooks>::cas_state(Word node, Word expect, Word next) {
  hooks_.on_op(OpKind::kCas, CellRole::kNodeField, 0);
  return sys_.nodes_[node].state.compare_exchange_strong(expect, next);
}
template <class Hooks>
inline bool NativeOps<Hooks>::cas_next(Word node, Word expect, Word next) {
  hooks_.on_op(OpKind::kCas, CellRole::kNodeField, 0);
  return sys_.nodes_[node].next.compare_exchange_strong(expect, next);
}
template <class Hooks>
inline Word NativeOps<Hooks>::faa_size(Word node, std::int64_t delta) {
  hooks_.on_op(OpKind::kFaa, CellRole::kNodeField, 0);
  return sys_.nodes_[node].size.fetch_add(static_cast<Word>(delta));
}
template <class Hooks>
inline Word NativeOps<Hooks>::allocate_node(std::uint32_t) {
  return sys_.nodes_.allocate();
}

}  // namespace gme
