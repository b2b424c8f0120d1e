#include "gme/sim/world.hpp"

#include <sstream>

#include "gme/state_flags.hpp"

namespace gme::sim {

World::World(const SystemConfig& cfg, bool instrument_rmr)
    : cfg_(cfg),
      gme_layout_(true),
      instrument_rmr_(instrument_rmr),
      trace_(cfg.processes) {
  init_gme_layout();
}

World::World(std::uint32_t raw_cells, bool instrument_rmr)
    : gme_layout_(false), instrument_rmr_(instrument_rmr), trace_(63) {
  cells_.resize(raw_cells);
  meta_.resize(raw_cells);
}

void World::init_gme_layout() {
  const std::uint32_t n = cfg_.processes;
  const std::uint32_t m = cfg_.instances;
  GME_CHECK(n >= 1 && m >= 1, "invalid system config");

  // Layout: [heads m][announce n][hazard 2n][ready n][node fields ...].
  cells_.resize(m + 4 * n);
  meta_.resize(m + 4 * n);
  for (std::uint32_t i = 0; i < m; ++i) meta_[i] = {CellRole::kHead, 0, 0, 0};
  for (std::uint32_t p = 1; p <= n; ++p) {
    meta_[announce_cell(p)] = {CellRole::kAnnounce, p, 0, 0};
    meta_[hazard_cell(p, 0)] = {CellRole::kHazard, p, 0, 0};
    meta_[hazard_cell(p, 1)] = {CellRole::kHazard, p, 0, 1};
    meta_[ready_cell(p)] = {CellRole::kReady, p, 0, 0};
  }
  node_cells_base_ = m + 4 * n;

  contexts_.resize(n + 1);
  joined_.assign(n + 1, kNullNode);
  alloc_cursor_.assign(n + 1, 0);
  for (std::uint32_t p = 1; p <= n; ++p) contexts_[p].me = p;
  instr_.resize(n);
  cached_version_.resize(n);

  shadows_.resize(1);  // index 0 unused

  for (std::uint32_t i = 1; i <= m; ++i) {
    const Word d = allocate_node_cells();
    poke(node_cell(d, NodeField::kState), kLeaderless);
    poke(node_cell(d, NodeField::kSession), kSessionNone);
    poke(node_cell(d, NodeField::kInstance), i);
    poke(node_cell(d, NodeField::kNumber), n);
    poke(node_cell(d, NodeField::kOwner), kOwnerInstance);
    poke(node_cell(d, NodeField::kCondition), kCondUnsafe);
    poke(head_cell(i), d);
    shadows_[d].published = true;
  }
  if (cfg_.features.reclaim) {
    const std::uint32_t slots = pool_slots(n);
    for (std::uint32_t p = 1; p <= n; ++p) {
      for (int w = 0; w < 2; ++w) {
        contexts_[p].pool[w].resize(slots);
        for (std::uint32_t k = 0; k < slots; ++k) {
          const Word ref = allocate_node_cells();
          poke(node_cell(ref, NodeField::kOwner), p);
          poke(node_cell(ref, NodeField::kCondition), kCondSafe);
          contexts_[p].pool[w][k] = ref;
        }
      }
    }
  }
  stripe_base_ = static_cast<std::uint32_t>(node_count_);
  allocations_ = 0;
}

std::uint32_t World::head_cell(std::uint32_t instance) const { return instance - 1; }
std::uint32_t World::announce_cell(std::uint32_t pid) const {
  return cfg_.instances + (pid - 1);
}
std::uint32_t World::hazard_cell(std::uint32_t pid, int slot) const {
  return cfg_.instances + cfg_.processes + (pid - 1) * 2 + static_cast<std::uint32_t>(slot);
}
std::uint32_t World::ready_cell(std::uint32_t pid) const {
  return cfg_.instances + 3 * cfg_.processes + (pid - 1);
}
std::uint32_t World::node_cell(Word node, NodeField f) const {
  return node_cells_base_ +
         static_cast<std::uint32_t>((node - 1) * kNodeFieldCount) +
         static_cast<std::uint32_t>(f);
}

Word World::allocate_node_cells() {
  const Word ref = ++node_count_;
  ensure_node(ref);
  return ref;
}

Word World::allocate_node_striped(std::uint32_t pid) {
  // A small stripe of ids per process keeps allocation schedule-independent
  // without bloating the cell table. Simulated non-reclaiming programs are
  // short by construction; long-lived runs use the reclaiming build.
  const std::uint32_t k = alloc_cursor_[pid]++;
  GME_CHECK(k < kAllocationStripe, "per-process allocation stripe exhausted");
  const Word ref = stripe_base_ + Word(pid - 1) * kAllocationStripe + k + 1;
  if (ref > node_count_) node_count_ = ref;
  ensure_node(ref);
  ++allocations_;
  return ref;
}

void World::ensure_node(Word ref) {
  const std::size_t need = node_cells_base_ + static_cast<std::size_t>(ref) * kNodeFieldCount;
  if (cells_.size() < need) {
    cells_.resize(need);
    meta_.resize(need);
  }
  for (std::uint32_t f = 0; f < kNodeFieldCount; ++f) {
    meta_[node_cell(ref, static_cast<NodeField>(f))] =
        {CellRole::kNodeField, 0, ref, static_cast<std::uint8_t>(f)};
  }
  if (shadows_.size() <= ref) shadows_.resize(ref + 1);
  shadows_[ref].exists = true;
}

void World::add_process(std::unique_ptr<SimProcess> p) {
  processes_.push_back(std::move(p));
  if (instr_.size() < processes_.size()) {
    instr_.resize(processes_.size());
    cached_version_.resize(processes_.size());
  }
}

std::vector<std::uint32_t> World::enabled() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < processes_.size(); ++i) {
    if (!processes_[i]->done()) out.push_back(i + 1);
  }
  return out;
}

bool World::all_done() const {
  for (const auto& p : processes_) {
    if (!p->done()) return false;
  }
  return true;
}

void World::step(std::uint32_t pid) {
  ++total_steps_;
  ++instr_[pid - 1].steps;
  processes_[pid - 1]->step(*this);
}

RunOutcome World::run_schedule(const std::vector<std::uint32_t>& schedule) {
  for (std::uint32_t pid : schedule) {
    if (all_done()) return RunOutcome::kQuiescent;
    GME_CHECK(pid >= 1 && pid <= processes_.size(), "schedule names unknown process");
    if (!processes_[pid - 1]->done()) step(pid);
  }
  return all_done() ? RunOutcome::kQuiescent : RunOutcome::kBudgetExhausted;
}

RunOutcome World::run_random(std::uint64_t seed, std::uint64_t max_steps) {
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    auto en = enabled();
    if (en.empty()) return RunOutcome::kQuiescent;
    const std::uint32_t pid =
        en[std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng)];
    step(pid);
  }
  return all_done() ? RunOutcome::kQuiescent : RunOutcome::kBudgetExhausted;
}

World::Snapshot World::snapshot() const {
  Snapshot s;
  s.cells = cells_;
  s.processes.reserve(processes_.size());
  for (const auto& p : processes_) s.processes.push_back(p->clone());
  s.shadows = shadows_;
  s.contexts = contexts_;
  s.joined = joined_;
  s.alloc_cursor = alloc_cursor_;
  s.node_count = node_count_;
  s.allocations = allocations_;
  s.total_steps = total_steps_;
  return s;
}

void World::restore(const Snapshot& s) {
  cells_ = s.cells;
  // Node-field meta must cover the restored (possibly larger) cell count.
  if (meta_.size() < cells_.size()) {
    meta_.resize(cells_.size());
    const std::uint64_t nodes = (cells_.size() - node_cells_base_) / kNodeFieldCount;
    for (Word ref = 1; ref <= nodes; ++ref) {
      for (std::uint32_t f = 0; f < kNodeFieldCount; ++f) {
        meta_[node_cell(ref, static_cast<NodeField>(f))] =
            {CellRole::kNodeField, 0, ref, static_cast<std::uint8_t>(f)};
      }
    }
  }
  processes_.clear();
  for (const auto& p : s.processes) processes_.push_back(p->clone());
  shadows_ = s.shadows;
  contexts_ = s.contexts;
  joined_ = s.joined;
  alloc_cursor_ = s.alloc_cursor;
  node_count_ = s.node_count;
  allocations_ = s.allocations;
  total_steps_ = s.total_steps;
}

std::pair<std::uint64_t, std::uint64_t> World::state_hash() const {
  Hasher h;
  for (const Cell& c : cells_) h(c.value);
  for (const auto& p : processes_) p->hash_into(h);
  for (std::uint32_t p = 1; p < contexts_.size(); ++p) {
    const ProcessContext& c = contexts_[p];
    h((Word(c.which) << 32) | c.marker);
    h(c.passage_in_epoch);
    h((Word(c.cleanup.phase) << 40) | (Word(c.cleanup.scan_stage) << 32) | c.cleanup.idx);
    h(c.cleanup.part_left);
    h(c.cleanup.scan_node);
    for (int w = 0; w < 2; ++w) {
      for (Word ref : c.pool[w]) h(ref);
    }
  }
  h(node_count_);
  return h.digest();
}

void World::fail(const std::string& msg) {
  if (violations_.size() < 64) violations_.push_back(msg);
}

void World::enable_hazard_audit() {
  audit_ = std::make_unique<HazardAudit>(cfg_.processes, 1u << 20);
}

void World::broadcast_announce(std::uint32_t by, std::uint32_t instance) {
  for (auto& p : processes_) p->on_announce_event(*this, by, instance);
}
void World::broadcast_exit_call(std::uint32_t by, std::uint32_t instance) {
  for (auto& p : processes_) p->on_exit_call_event(*this, by, instance);
}
void World::broadcast_established(std::uint32_t instance, Word session) {
  for (auto& p : processes_) p->on_established_event(*this, instance, session);
}
std::uint32_t World::count_inflight_on(std::uint32_t instance) const {
  std::uint32_t c = 0;
  for (const auto& p : processes_) {
    if (p->inflight_on(instance)) ++c;
  }
  return c;
}

bool World::pool_membership_ok() const {
  std::vector<std::uint32_t> seen(node_count_ + 1, 0);
  for (std::uint32_t i = 1; i <= cfg_.instances; ++i) {
    const Word h = peek(head_cell(i));
    if (h == kNullNode || h > node_count_) return false;
    ++seen[h];
  }
  for (std::uint32_t p = 1; p <= cfg_.processes; ++p) {
    for (int w = 0; w < 2; ++w) {
      for (Word ref : contexts_[p].pool[w]) {
        if (ref == kNullNode || ref > node_count_) return false;
        ++seen[ref];
      }
    }
  }
  for (Word ref = 1; ref <= node_count_; ++ref) {
    if (seen[ref] != 1) return false;
  }
  return true;
}

// ---- accounting -------------------------------------------------------------

void World::count_access(std::uint32_t pid, std::uint32_t cell, Access a) {
  ProcessInstr& in = instr_[pid - 1];
  ++in.ops;
  if (instrument_rmr_) {
    auto& cache = cached_version_[pid - 1];
    if (cache.size() <= cell) cache.resize(cells_.size(), ~0ull);
    if (a == Access::kRead) {
      if (cache[cell] != cells_[cell].version) {
        ++in.rmrs;
        cache[cell] = cells_[cell].version;
      }
    } else {
      // Writes, CAS, and FAA always cost one remote reference; the writer's
      // cache ends up holding the line.
      ++in.rmrs;
      cache[cell] = cells_[cell].version;
    }
  }
  if (in.in_wait && a == Access::kRead) {
    ++in.wait_reads;
    const CellMeta& mt = meta_[cell];
    if (!(mt.role == CellRole::kReady && mt.home == pid)) ++in.remote_wait_reads;
  }
}

Word World::access(std::uint32_t pid, std::uint32_t cell, Access a, Word operand,
                   Word operand2) {
  GME_CHECK(cell < cells_.size(), "cell id out of range");
  Cell& c = cells_[cell];
  switch (a) {
    case Access::kRead:
      count_access(pid, cell, a);
      return c.value;
    case Access::kWrite:
      c.value = operand;
      ++c.version;
      count_access(pid, cell, a);
      return 0;
    case Access::kFaa: {
      const Word old = c.value;
      c.value += operand;
      ++c.version;
      count_access(pid, cell, a);
      return old;
    }
    default: {
      if (c.value == operand) {
        c.value = operand2;
        ++c.version;
        count_access(pid, cell, Access::kCasOk);
        return 1;
      }
      count_access(pid, cell, Access::kCasFail);
      return 0;
    }
  }
}

void World::mark_init_write(std::uint32_t pid, Word node, NodeField f) {
  NodeShadow& sh = shadows_[node];
  if (sh.initializing) {
    sh.init_mask |= static_cast<std::uint16_t>(1u << static_cast<unsigned>(f));
  } else {
    // Field writes outside the initialization window are append-side writes
    // (prev, number) or state transitions; those have their own checks.
    if (f != NodeField::kPrev && f != NodeField::kNumber && f != NodeField::kState &&
        f != NodeField::kOwner && f != NodeField::kCondition) {
      std::ostringstream os;
      os << "process " << pid << " wrote node field "
         << static_cast<unsigned>(f) << " of node " << node
         << " outside its initialization window";
      fail(os.str());
    }
  }
}

void World::check_state_mutation(std::uint32_t pid, std::uint32_t cell, Word oldv,
                                 Word newv, bool is_cas) {
  const Word node = meta_[cell].node;
  if (!flags_lattice_ok(newv)) {
    std::ostringstream os;
    os << "state lattice violated on node " << node << ": old=" << oldv
       << " new=" << newv << " by process " << pid;
    fail(os.str());
  }
  if (is_cas && (newv & oldv) != oldv) {
    fail("state CAS cleared flags");
  }
  if (!(oldv & kVacant) && (newv & kVacant)) {
    if (is_cas && !is_closed(oldv)) {
      fail("VACANT set on a session that was not closed");
    }
    if (shadows_[node].participants != 0) {
      std::ostringstream os;
      os << "session on node " << node << " adjourned with "
         << shadows_[node].participants << " joined participants";
      fail(os.str());
    }
  }
}

// ---- SimOps -----------------------------------------------------------------

Word SimOps::read_head(std::uint32_t instance) {
  return w_.access(pid_, w_.head_cell(instance), World::Access::kRead, 0);
}

bool SimOps::cas_head(std::uint32_t instance, Word expect, Word next) {
  const bool ok =
      w_.access(pid_, w_.head_cell(instance), World::Access::kCasOk, expect, next) != 0;
  if (ok) {
    const Word session = w_.peek_node(next, NodeField::kSession);
    w_.trace().emit(pid_, instance, session, EventKind::kSessionEstablished);
    w_.broadcast_established(instance, session);
  }
  return ok;
}

Word SimOps::read_announce(std::uint32_t pid) {
  const Word v = w_.access(pid_, w_.announce_cell(pid), World::Access::kRead, 0);
  if (v != kNullNode && !w_.shadow(v).published) {
    w_.fail("announce slot observed before node publication completed");
  }
  return v;
}

void SimOps::write_announce(std::uint32_t pid, Word v) {
  if (v != kNullNode) {
    NodeShadow& sh = w_.shadow(v);
    std::uint16_t required = (1u << kNodeFieldCount) - 1;
    if (!w_.config().features.reclaim) {
      required &= static_cast<std::uint16_t>(
          ~(1u << static_cast<unsigned>(NodeField::kCondition)));
    }
    if ((sh.init_mask & required) != required) {
      w_.fail("node announced before all fields were initialized");
    }
    sh.initializing = false;
    sh.published = true;
  }
  w_.access(pid_, w_.announce_cell(pid), World::Access::kWrite, v);
  if (v != kNullNode) {
    const std::uint32_t inst =
        static_cast<std::uint32_t>(w_.peek_node(v, NodeField::kInstance));
    w_.trace().emit(pid_, inst, w_.peek_node(v, NodeField::kSession),
                    EventKind::kAnnounce);
    w_.broadcast_announce(pid_, inst);
  }
}

Word SimOps::read_hazard(std::uint32_t pid, int slot) {
  return w_.access(pid_, w_.hazard_cell(pid, slot), World::Access::kRead, 0);
}
void SimOps::write_hazard(std::uint32_t pid, int slot, Word v) {
  w_.access(pid_, w_.hazard_cell(pid, slot), World::Access::kWrite, v);
  if (w_.audit()) w_.audit()->on_hazard_write(pid, slot, v);
}
Word SimOps::read_ready(std::uint32_t pid) {
  return w_.access(pid_, w_.ready_cell(pid), World::Access::kRead, 0);
}
void SimOps::write_ready(std::uint32_t pid, Word v) {
  w_.access(pid_, w_.ready_cell(pid), World::Access::kWrite, v);
}
bool SimOps::cas_ready(std::uint32_t pid, Word expect, Word next) {
  return w_.access(pid_, w_.ready_cell(pid), World::Access::kCasOk, expect, next) != 0;
}

Word SimOps::read_state(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kState), World::Access::kRead, 0);
}
void SimOps::write_state(Word node, Word v) {
  const std::uint32_t cell = w_.node_cell(node, NodeField::kState);
  const Word oldv = w_.peek(cell);
  if ((oldv & ~v) != 0 && !w_.shadow(node).initializing) {
    w_.fail("state flags cleared outside node re-initialization");
  }
  w_.mark_init_write(pid_, node, NodeField::kState);
  w_.access(pid_, cell, World::Access::kWrite, v);
  if (!w_.shadow(node).initializing) w_.check_state_mutation(pid_, cell, oldv, v, false);
}
bool SimOps::cas_state(Word node, Word expect, Word next) {
  const std::uint32_t cell = w_.node_cell(node, NodeField::kState);
  const Word oldv = w_.peek(cell);
  const bool ok = w_.access(pid_, cell, World::Access::kCasOk, expect, next) != 0;
  if (ok) w_.check_state_mutation(pid_, cell, oldv, next, true);
  return ok;
}
Word SimOps::read_size(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kSize), World::Access::kRead, 0);
}
void SimOps::write_size(Word node, Word v) {
  w_.mark_init_write(pid_, node, NodeField::kSize);
  w_.access(pid_, w_.node_cell(node, NodeField::kSize), World::Access::kWrite, v);
}
Word SimOps::faa_size(Word node, std::int64_t delta) {
  const Word old = w_.access(pid_, w_.node_cell(node, NodeField::kSize),
                             World::Access::kFaa, static_cast<Word>(delta));
  const auto now = static_cast<std::int64_t>(old) + delta;
  if (now < 0) w_.fail("session size went negative");
  return old;
}
Word SimOps::read_next(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kNext), World::Access::kRead, 0);
}
void SimOps::write_next(Word node, Word v) {
  w_.mark_init_write(pid_, node, NodeField::kNext);
  w_.access(pid_, w_.node_cell(node, NodeField::kNext), World::Access::kWrite, v);
}
bool SimOps::cas_next(Word node, Word expect, Word next) {
  GME_CHECK(expect == kNullNode, "next is only ever CASed from null");
  const bool ok = w_.access(pid_, w_.node_cell(node, NodeField::kNext),
                            World::Access::kCasOk, expect, next) != 0;
  if (ok) {
    const Word st = w_.peek_node(node, NodeField::kState);
    if (!is_adjourned(st)) {
      w_.fail("node appended before the head session adjourned");
    }
  }
  return ok;
}
Word SimOps::read_prev(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kPrev), World::Access::kRead, 0);
}
void SimOps::write_prev(Word node, Word v) {
  // Concurrent helpers appending the same successor write identical values.
  const Word old = w_.peek_node(node, NodeField::kPrev);
  if (!w_.shadow(node).initializing && old != kNullNode && old != v) {
    w_.fail("duplicate prev writes disagree");
  }
  w_.mark_init_write(pid_, node, NodeField::kPrev);
  w_.access(pid_, w_.node_cell(node, NodeField::kPrev), World::Access::kWrite, v);
}
Word SimOps::read_number(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kNumber), World::Access::kRead, 0);
}
void SimOps::write_number(Word node, Word v) {
  const Word old = w_.peek_node(node, NodeField::kNumber);
  if (!w_.shadow(node).initializing && old != 0 && old != v) {
    w_.fail("duplicate help-index writes disagree");
  }
  w_.mark_init_write(pid_, node, NodeField::kNumber);
  w_.access(pid_, w_.node_cell(node, NodeField::kNumber), World::Access::kWrite, v);
}
Word SimOps::read_owner(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kOwner), World::Access::kRead, 0);
}
void SimOps::write_owner(Word node, Word v) {
  w_.mark_init_write(pid_, node, NodeField::kOwner);
  w_.access(pid_, w_.node_cell(node, NodeField::kOwner), World::Access::kWrite, v);
}
Word SimOps::read_session(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kSession), World::Access::kRead, 0);
}
void SimOps::write_session(Word node, Word v) {
  w_.mark_init_write(pid_, node, NodeField::kSession);
  w_.access(pid_, w_.node_cell(node, NodeField::kSession), World::Access::kWrite, v);
}
Word SimOps::read_instance(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kInstance), World::Access::kRead, 0);
}
void SimOps::write_instance(Word node, Word v) {
  w_.mark_init_write(pid_, node, NodeField::kInstance);
  w_.access(pid_, w_.node_cell(node, NodeField::kInstance), World::Access::kWrite, v);
}
Word SimOps::read_condition(Word node) {
  return w_.access(pid_, w_.node_cell(node, NodeField::kCondition), World::Access::kRead, 0);
}
void SimOps::write_condition(Word node, Word v) {
  w_.mark_init_write(pid_, node, NodeField::kCondition);
  w_.access(pid_, w_.node_cell(node, NodeField::kCondition), World::Access::kWrite, v);
}

Word SimOps::allocate_node(std::uint32_t pid) {
  const Word ref = w_.gme_layout() ? w_.allocate_node_striped(pid)
                                   : w_.allocate_node_cells();
  NodeShadow& sh = w_.shadow(ref);
  sh.initializing = true;
  sh.init_mask = 0;
  sh.published = false;
  return ref;
}

void SimOps::note_acquire(std::uint32_t pid, Word node) {
  NodeShadow& sh = w_.shadow(node);
  sh.initializing = true;
  sh.init_mask = 0;
  sh.published = false;
  if (w_.audit()) w_.audit()->on_acquire(node);
  (void)pid;
}
void SimOps::note_validated(std::uint32_t pid, int slot, Word node) {
  if (w_.audit()) w_.audit()->on_validated(pid, slot, node);
}
void SimOps::note_retire(std::uint32_t pid, Word node) {
  if (is_retired(w_.peek_node(node, NodeField::kState))) {
    std::ostringstream os;
    os << "process " << pid << " retired node " << node << " twice";
    w_.fail(os.str());
  }
  if (w_.audit()) w_.audit()->on_retire(node);
  w_.trace().emit(pid, static_cast<std::uint32_t>(w_.peek_node(node, NodeField::kInstance)),
                  w_.peek_node(node, NodeField::kSession), EventKind::kRetire);
}
void SimOps::note_join(std::uint32_t pid, Word node) {
  ++w_.shadow(node).participants;
  w_.joined_[pid] = node;
}
void SimOps::note_leave(std::uint32_t pid, Word node) {
  if (w_.joined_[pid] != node) {
    w_.fail("exit section read a head that differs from the joined node");
  }
  --w_.shadow(node).participants;
  w_.joined_[pid] = kNullNode;
}
void SimOps::begin_wait(std::uint32_t pid) { w_.instr(pid).in_wait = true; }
void SimOps::end_wait(std::uint32_t pid) { w_.instr(pid).in_wait = false; }

Word SimOps::raw_read(std::uint32_t cell) {
  return w_.access(pid_, cell, World::Access::kRead, 0);
}
void SimOps::raw_write(std::uint32_t cell, Word v) {
  w_.access(pid_, cell, World::Access::kWrite, v);
}
bool SimOps::raw_cas(std::uint32_t cell, Word expect, Word next) {
  return w_.access(pid_, cell, World::Access::kCasOk, expect, next) != 0;
}
Word SimOps::raw_faa(std::uint32_t cell, std::int64_t delta) {
  return w_.access(pid_, cell, World::Access::kFaa, static_cast<Word>(delta));
}

}  // namespace gme::sim
