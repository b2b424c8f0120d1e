#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gme/context.hpp"
#include "gme/instrumentation.hpp"
#include "gme/machine.hpp"
#include "gme/trace.hpp"
#include "gme/types.hpp"

namespace gme::sim {

// Word-sized shared cell with a write-version counter. The version backs the
// cache-coherent RMR accounting: a read is remote iff the reader's cached
// version is stale; every mutation bumps the version by one.
struct Cell {
  Word value = 0;
  std::uint64_t version = 0;
};

struct CellMeta {
  CellRole role = CellRole::kScratch;
  std::uint32_t home = 0;  // owning process for announce/hazard/ready cells
  Word node = 0;           // owning node for node-field cells
  std::uint8_t field = 0;
};

// Per-process id stripe for dynamic allocation in simulated worlds.
inline constexpr std::uint32_t kAllocationStripe = 32;

enum class NodeField : std::uint8_t {
  kState = 0,
  kSize,
  kNext,
  kOwner,
  kCondition,
  kPrev,
  kNumber,
  kSession,
  kInstance,
};
inline constexpr std::uint32_t kNodeFieldCount = 9;

struct Hasher {
  std::uint64_t a = 0x9e3779b97f4a7c15ull;
  std::uint64_t b = 0xc2b2ae3d27d4eb4full;
  void operator()(std::uint64_t x) {
    auto mix = [](std::uint64_t v) {
      v ^= v >> 30;
      v *= 0xbf58476d1ce4e5b9ull;
      v ^= v >> 27;
      v *= 0x94d049bb133111ebull;
      v ^= v >> 31;
      return v;
    };
    a = mix(a ^ x);
    b = mix(b + 0x9e3779b97f4a7c15ull + x);
  }
  std::pair<std::uint64_t, std::uint64_t> digest() const { return {a, b}; }
};

class World;

// A cooperatively stepped process. One step performs at most one cell
// operation. Processes must be clonable so the explorer can snapshot states.
class SimProcess {
 public:
  virtual ~SimProcess() = default;
  virtual bool done() const = 0;
  virtual void step(World& w) = 0;
  virtual void hash_into(Hasher& h) const = 0;
  virtual std::unique_ptr<SimProcess> clone() const = 0;

  // Broadcast notifications used by the passage drivers to maintain
  // per-passage contention counters. Default: ignore.
  virtual void on_announce_event(World&, std::uint32_t /*by*/, std::uint32_t /*inst*/) {}
  virtual void on_exit_call_event(World&, std::uint32_t /*by*/, std::uint32_t /*inst*/) {}
  virtual void on_established_event(World&, std::uint32_t /*inst*/, Word /*session*/) {}
  virtual bool inflight_on(std::uint32_t /*inst*/) const { return false; }
};

// Cell operations bound to one process, with model checks and accounting.
class SimOps {
 public:
  SimOps(World& w, std::uint32_t pid) : w_(w), pid_(pid) {}

  Word read_head(std::uint32_t instance);
  bool cas_head(std::uint32_t instance, Word expect, Word next);
  Word read_announce(std::uint32_t pid);
  void write_announce(std::uint32_t pid, Word v);
  Word read_hazard(std::uint32_t pid, int slot);
  void write_hazard(std::uint32_t pid, int slot, Word v);
  Word read_ready(std::uint32_t pid);
  void write_ready(std::uint32_t pid, Word v);
  bool cas_ready(std::uint32_t pid, Word expect, Word next);

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

  Word allocate_node(std::uint32_t pid);

  void note_acquire(std::uint32_t pid, Word node);
  void note_validated(std::uint32_t pid, int slot, Word node);
  void note_retire(std::uint32_t pid, Word node);
  void note_join(std::uint32_t pid, Word node);
  void note_leave(std::uint32_t pid, Word node);
  void begin_wait(std::uint32_t pid);
  void end_wait(std::uint32_t pid);

  // Raw access for backend-level test programs.
  Word raw_read(std::uint32_t cell);
  void raw_write(std::uint32_t cell, Word v);
  bool raw_cas(std::uint32_t cell, Word expect, Word next);
  Word raw_faa(std::uint32_t cell, std::int64_t delta);

 private:
  World& w_;
  std::uint32_t pid_;
};

// Per-node bookkeeping used only for model checking; not part of the
// algorithm state.
struct NodeShadow {
  std::uint16_t init_mask = 0;       // fields written during initialization
  bool exists = false;               // allocated (striped ids leave holes)
  bool initializing = false;         // between acquire/alloc and announce
  bool published = false;            // announce completed at least once
  std::int32_t participants = 0;     // processes that joined and not yet left
};

struct ProcessInstr {
  std::uint64_t steps = 0;  // process steps (cell ops + local)
  std::uint64_t ops = 0;    // cell operations
  std::uint64_t rmrs = 0;
  bool in_wait = false;
  std::uint64_t wait_reads = 0;
  std::uint64_t remote_wait_reads = 0;
};

// Outcome of a scheduled run.
enum class RunOutcome { kQuiescent, kBudgetExhausted };

// The simulated shared-memory world: the cell store, the registered
// processes, the schedule controller, instrumentation, and the model checks.
class World {
 public:
  // GME world: full system layout plus one passage driver per process.
  World(const SystemConfig& cfg, bool instrument_rmr = false);
  // Raw world: `cells` scratch cells, processes added by tests.
  explicit World(std::uint32_t raw_cells, bool instrument_rmr = false);

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  const SystemConfig& config() const { return cfg_; }
  bool gme_layout() const { return gme_layout_; }

  void add_process(std::unique_ptr<SimProcess> p);
  SimProcess& process(std::uint32_t pid) { return *processes_[pid - 1]; }
  std::uint32_t process_count() const {
    return static_cast<std::uint32_t>(processes_.size());
  }

  std::vector<std::uint32_t> enabled() const;
  bool all_done() const;
  void step(std::uint32_t pid);
  std::uint64_t total_steps() const { return total_steps_; }

  // Deterministic runs: explicit schedule, or seeded uniform-random choice
  // among enabled processes. Budget exhaustion is reported distinctly from
  // quiescence (a potential livelock under that schedule).
  RunOutcome run_schedule(const std::vector<std::uint32_t>& schedule);
  RunOutcome run_random(std::uint64_t seed, std::uint64_t max_steps);

  // Snapshot / restore for the explorer.
  struct Snapshot {
    std::vector<Cell> cells;
    std::vector<std::unique_ptr<SimProcess>> processes;
    std::vector<NodeShadow> shadows;
    std::vector<ProcessContext> contexts;
    std::vector<Word> joined;
    std::vector<std::uint32_t> alloc_cursor;
    std::uint64_t node_count = 0;
    std::uint64_t allocations = 0;
    std::uint64_t total_steps = 0;
  };
  Snapshot snapshot() const;
  void restore(const Snapshot& s);

  std::pair<std::uint64_t, std::uint64_t> state_hash() const;

  // --- violations & instrumentation ---
  void fail(const std::string& msg);
  const std::vector<std::string>& violations() const { return violations_; }
  const ProcessInstr& instr(std::uint32_t pid) const { return instr_[pid - 1]; }
  ProcessInstr& instr(std::uint32_t pid) { return instr_[pid - 1]; }
  TraceRecorder& trace() { return trace_; }
  HazardAudit* audit() { return audit_.get(); }
  void enable_hazard_audit();

  // --- GME layout helpers ---
  std::uint32_t head_cell(std::uint32_t instance) const;
  std::uint32_t announce_cell(std::uint32_t pid) const;
  std::uint32_t hazard_cell(std::uint32_t pid, int slot) const;
  std::uint32_t ready_cell(std::uint32_t pid) const;
  std::uint32_t node_cell(Word node, NodeField f) const;
  Word allocate_node_cells();
  // Dynamic allocation (non-reclaiming build): ids are striped per process so
  // they do not depend on the schedule, which keeps the explorer's state
  // space canonical.
  Word allocate_node_striped(std::uint32_t pid);
  std::uint64_t node_count() const { return node_count_; }
  std::uint64_t allocations_since_init() const { return allocations_; }

  ProcessContext& context(std::uint32_t pid) { return contexts_[pid]; }

  // Unchecked test access.
  Word peek(std::uint32_t cell) const { return cells_[cell].value; }
  void poke(std::uint32_t cell, Word v) {
    cells_[cell].value = v;
    ++cells_[cell].version;
  }
  Word peek_node(Word node, NodeField f) const { return peek(node_cell(node, f)); }

  NodeShadow& shadow(Word node) { return shadows_[node]; }
  Word joined_node(std::uint32_t pid) const { return joined_[pid]; }

  // Quiescent-state pool-membership audit (reclaiming layout).
  bool pool_membership_ok() const;

  // Broadcasts to all processes (contention bookkeeping).
  void broadcast_announce(std::uint32_t by, std::uint32_t instance);
  void broadcast_exit_call(std::uint32_t by, std::uint32_t instance);
  void broadcast_established(std::uint32_t instance, Word session);
  std::uint32_t count_inflight_on(std::uint32_t instance) const;

 private:
  friend class SimOps;

  enum class Access : std::uint8_t { kRead, kWrite, kCasOk, kCasFail, kFaa };
  Word access(std::uint32_t pid, std::uint32_t cell, Access a, Word operand,
              Word operand2 = 0);
  void count_access(std::uint32_t pid, std::uint32_t cell, Access a);
  void check_state_mutation(std::uint32_t pid, std::uint32_t cell, Word oldv, Word newv,
                            bool is_cas);
  void init_gme_layout();
  void ensure_node(Word ref);
  void mark_init_write(std::uint32_t pid, Word node, NodeField f);

  SystemConfig cfg_{};
  bool gme_layout_ = false;
  bool instrument_rmr_ = false;

  std::vector<Cell> cells_;
  std::vector<CellMeta> meta_;
  std::vector<std::unique_ptr<SimProcess>> processes_;
  std::vector<ProcessInstr> instr_;
  std::vector<std::vector<std::uint64_t>> cached_version_;  // [pid-1][cell]

  std::vector<NodeShadow> shadows_;          // [node]
  std::vector<ProcessContext> contexts_;     // [pid]
  std::vector<Word> joined_;                 // [pid] node joined this passage
  std::vector<std::uint32_t> alloc_cursor_;  // [pid] striped allocation count
  std::uint64_t node_count_ = 0;
  std::uint64_t allocations_ = 0;
  std::uint32_t stripe_base_ = 0;
  std::uint32_t node_cells_base_ = 0;

  std::uint64_t total_steps_ = 0;
  std::vector<std::string> violations_;
  TraceRecorder trace_;
  std::unique_ptr<HazardAudit> audit_;
};

}  // namespace gme::sim
