#pragma once

#include <algorithm>
#include <memory>
#include <vector>

#include "gme/machine.hpp"
#include "gme/sim/world.hpp"

namespace gme::sim {

// Drives one process through a fixed program of passages: entry section,
// a short local critical section, exit section. Also maintains the
// per-passage contention counters behind the context-switch checks:
//   cbar  - passages on the same instance overlapping this one (interval
//           contention, excluding self)
//   cdot  - maximum simultaneous passages on the instance during this one
//           (point contention, including self)
//   estab - sessions established on the instance during the entry section
class PassageDriver : public SimProcess {
 public:
  struct Spec {
    std::uint32_t instance = 1;
    Word session = 1;
  };

  enum class Phase : std::uint8_t { kIdle, kEntering, kInCs, kExiting, kDone };

  PassageDriver(std::uint32_t pid, const SystemConfig& cfg, std::vector<Spec> program,
                std::uint32_t cs_steps = 1)
      : pid_(pid), cfg_(cfg), program_(std::move(program)), cs_steps_(cs_steps) {
    if (program_.empty()) phase_ = Phase::kDone;
  }

  bool done() const override { return phase_ == Phase::kDone; }

  void step(World& w) override {
    switch (phase_) {
      case Phase::kIdle: {
        const Spec& spec = program_[idx_];
        machine_.begin_enter(pid_, cfg_, spec.instance, spec.session);
        const std::uint32_t others = w.count_inflight_on(spec.instance);
        cbar_ = others;
        cdot_ = others + 1;
        estab_ = 0;
        enter_returned_ = false;
        inflight_ = true;
        phase_ = Phase::kEntering;
        w.broadcast_announce(pid_, spec.instance);
        return;
      }
      case Phase::kEntering: {
        SimOps ops(w, pid_);
        if (machine_.step(ops, w.context(pid_)) == Step::kDone) {
          enter_returned_ = true;
          const Spec& spec = program_[idx_];
          w.trace().emit(pid_, spec.instance, spec.session, EventKind::kEnterReturn);
          check_entry_bounds(w);
          record_entry_stats();
          phase_ = Phase::kInCs;
          cs_left_ = cs_steps_;
        }
        return;
      }
      case Phase::kInCs: {
        if (cs_left_ > 1) {
          --cs_left_;
          return;
        }
        const Spec& spec = program_[idx_];
        w.trace().emit(pid_, spec.instance, kSessionNone, EventKind::kExitCall);
        machine_.begin_exit(pid_, cfg_, spec.instance);
        phase_ = Phase::kExiting;
        return;
      }
      case Phase::kExiting: {
        SimOps ops(w, pid_);
        if (machine_.step(ops, w.context(pid_)) == Step::kDone) {
          const Spec& spec = program_[idx_];
          if (machine_.stats.guard_reads_max > 3 || machine_.stats.guard_cas_max > 2) {
            w.fail("SetGuardFlag exceeded its O(1) retry bound in exit");
          }
          max_exit_guard_cas_ = std::max(max_exit_guard_cas_, machine_.stats.guard_cas_max);
          inflight_ = false;
          sum_estab_ += estab_;
          sum_cdot_plus1_ += cdot_ + 1;
          w.broadcast_exit_call(pid_, spec.instance);
          ++idx_;
          phase_ = (idx_ == program_.size()) ? Phase::kDone : Phase::kIdle;
        }
        return;
      }
      case Phase::kDone:
        return;
    }
  }

  void hash_into(Hasher& h) const override {
    h((Word(pid_) << 8) | Word(phase_));
    h((Word(idx_) << 32) | cs_left_);
    // Contention counters are part of the checked state by default; large
    // explorations may exclude them to collapse window-history variety (the
    // bound checks then cover the DFS tree's paths).
    if (hash_contention_) {
      h((Word(cbar_) << 40) | (Word(estab_) << 20) | cdot_);
    }
    h(Word(inflight_) << 1 | Word(enter_returned_));
    machine_.hash_into(h);
  }

  std::unique_ptr<SimProcess> clone() const override {
    return std::make_unique<PassageDriver>(*this);
  }

  void on_announce_event(World& w, std::uint32_t by, std::uint32_t inst) override {
    if (inflight_ && by != pid_ && inst == current_instance()) {
      ++cbar_;
      cdot_ = std::max(cdot_, w.count_inflight_on(inst));
    }
  }

  void on_established_event(World&, std::uint32_t inst, Word) override {
    if (inflight_ && !enter_returned_ && inst == current_instance()) ++estab_;
  }

  bool inflight_on(std::uint32_t inst) const override {
    return inflight_ && inst == current_instance();
  }

  bool in_cs(std::uint32_t* inst, Word* session) const {
    if (phase_ != Phase::kInCs) return false;
    if (inst) *inst = program_[idx_].instance;
    if (session) *session = program_[idx_].session;
    return true;
  }

  void set_hash_contention(bool on) { hash_contention_ = on; }

  Phase phase() const { return phase_; }
  std::uint32_t pid() const { return pid_; }
  std::uint32_t cbar() const { return cbar_; }
  std::uint32_t estab() const { return estab_; }
  std::uint32_t cdot() const { return cdot_; }
  std::uint64_t sum_estab() const { return sum_estab_; }
  std::uint64_t sum_cdot_plus1() const { return sum_cdot_plus1_; }
  std::uint32_t max_outer() const { return max_outer_; }
  std::uint32_t max_inner() const { return max_inner_; }
  std::uint32_t max_guard_reads() const { return max_guard_reads_; }
  std::uint32_t max_guard_cas() const { return max_guard_cas_; }
  const PassageMachine& machine() const { return machine_; }

 private:
  std::uint32_t current_instance() const {
    return idx_ < program_.size() ? program_[idx_].instance : 0;
  }

  void check_entry_bounds(World& w) {
    const std::uint32_t n = cfg_.processes;
    const std::uint32_t bound = std::min(cbar_, n) + 1;
    // Both bounds rely on the round-robin helping; the deadlock-free-only
    // variant may exceed them under adversarial schedules.
    if (cfg_.features.helping && estab_ > bound) {
      w.fail("context-switch bound exceeded: estab=" + std::to_string(estab_) +
             " cbar=" + std::to_string(cbar_) + " n=" + std::to_string(n));
    }
    if (cfg_.features.helping &&
        machine_.stats.readhead_iters > 2 * (estab_ + 1)) {
      w.fail("ReadHead loop iterations exceeded 2x overlapping sessions");
    }
    if (machine_.stats.guard_reads_max > 3 || machine_.stats.guard_cas_max > 2) {
      w.fail("SetGuardFlag exceeded its O(1) retry bound");
    }
  }

  void record_entry_stats() {
    max_outer_ = std::max(max_outer_, machine_.stats.outer_iters);
    max_inner_ = std::max(max_inner_, machine_.stats.inner_spins);
    max_guard_reads_ = std::max(max_guard_reads_, machine_.stats.guard_reads_max);
    max_guard_cas_ = std::max(max_guard_cas_, machine_.stats.guard_cas_max);
  }

  std::uint32_t pid_;
  SystemConfig cfg_;
  std::vector<Spec> program_;
  std::uint32_t cs_steps_;

  Phase phase_ = Phase::kIdle;
  std::size_t idx_ = 0;
  std::uint32_t cs_left_ = 0;
  PassageMachine machine_{};

  bool inflight_ = false;
  bool enter_returned_ = false;
  bool hash_contention_ = true;
  std::uint32_t cbar_ = 0;
  std::uint32_t estab_ = 0;
  std::uint32_t cdot_ = 0;
  std::uint64_t sum_estab_ = 0;
  std::uint64_t sum_cdot_plus1_ = 0;

  std::uint32_t max_outer_ = 0;
  std::uint32_t max_inner_ = 0;
  std::uint32_t max_guard_reads_ = 0;
  std::uint32_t max_guard_cas_ = 0;
  std::uint32_t max_exit_guard_cas_ = 0;
};

// A GME world with one passage driver per process.
inline std::unique_ptr<World> make_passage_world(
    const SystemConfig& cfg,
    const std::vector<std::vector<PassageDriver::Spec>>& programs,
    std::uint32_t cs_steps = 1, bool instrument_rmr = false) {
  auto w = std::make_unique<World>(cfg, instrument_rmr);
  for (std::uint32_t p = 1; p <= cfg.processes; ++p) {
    w->add_process(
        std::make_unique<PassageDriver>(p, cfg, programs[p - 1], cs_steps));
  }
  return w;
}

}  // namespace gme::sim
