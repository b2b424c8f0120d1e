#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <set>
#include <vector>

#include "gme/sim/driver.hpp"
#include "gme/sim/world.hpp"
#include "gme/steps.hpp"

namespace gme::testing {

// ---------------------------------------------------------------------------
// Independent brute-force oracle for word-cell programs. Executes read /
// write / CAS / FAA semantics directly on plain arrays and enumerates every
// interleaving recursively. Deliberately shares no code with the simulator.
// ---------------------------------------------------------------------------

struct MiniOp {
  enum Kind { kRead, kWrite, kCas, kFaa } kind = kRead;
  std::uint32_t cell = 0;
  Word a = 0;  // write value / CAS expected / FAA delta
  Word b = 0;  // CAS new value
};
using MiniProgram = std::vector<MiniOp>;

struct Outcome {
  std::vector<Word> cells;
  std::vector<std::vector<Word>> returns;
  bool operator<(const Outcome& o) const {
    if (cells != o.cells) return cells < o.cells;
    return returns < o.returns;
  }
  bool operator==(const Outcome& o) const {
    return cells == o.cells && returns == o.returns;
  }
};

inline void oracle_recurse(std::vector<Word>& cells,
                           const std::vector<MiniProgram>& progs,
                           std::vector<std::size_t>& pc,
                           std::vector<std::vector<Word>>& rets,
                           std::set<Outcome>& out) {
  bool any = false;
  for (std::size_t p = 0; p < progs.size(); ++p) {
    if (pc[p] >= progs[p].size()) continue;
    any = true;
    const MiniOp op = progs[p][pc[p]];
    const Word saved = cells[op.cell];
    Word ret = 0;
    switch (op.kind) {
      case MiniOp::kRead:
        ret = saved;
        break;
      case MiniOp::kWrite:
        cells[op.cell] = op.a;
        break;
      case MiniOp::kCas:
        if (saved == op.a) {
          cells[op.cell] = op.b;
          ret = 1;
        }
        break;
      case MiniOp::kFaa:
        cells[op.cell] = saved + op.a;
        ret = saved;
        break;
    }
    ++pc[p];
    rets[p].push_back(ret);
    oracle_recurse(cells, progs, pc, rets, out);
    rets[p].pop_back();
    --pc[p];
    cells[op.cell] = saved;
  }
  if (!any) out.insert(Outcome{cells, rets});
}

inline std::set<Outcome> oracle_outcomes(std::uint32_t ncells,
                                         const std::vector<MiniProgram>& progs) {
  std::vector<Word> cells(ncells, 0);
  std::vector<std::size_t> pc(progs.size(), 0);
  std::vector<std::vector<Word>> rets(progs.size());
  std::set<Outcome> out;
  oracle_recurse(cells, progs, pc, rets, out);
  return out;
}

// ---------------------------------------------------------------------------
// Simulator-side adapters.
// ---------------------------------------------------------------------------

// Runs a MiniProgram through the simulated backend, one op per step.
class MiniProc : public sim::SimProcess {
 public:
  MiniProc(std::uint32_t pid, MiniProgram prog) : pid_(pid), prog_(std::move(prog)) {}

  bool done() const override { return pc_ >= prog_.size(); }

  void step(sim::World& w) override {
    const MiniOp op = prog_[pc_++];
    sim::SimOps ops(w, pid_);
    Word ret = 0;
    switch (op.kind) {
      case MiniOp::kRead:
        ret = ops.raw_read(op.cell);
        break;
      case MiniOp::kWrite:
        ops.raw_write(op.cell, op.a);
        break;
      case MiniOp::kCas:
        ret = ops.raw_cas(op.cell, op.a, op.b) ? 1 : 0;
        break;
      case MiniOp::kFaa:
        ret = ops.raw_faa(op.cell, static_cast<std::int64_t>(op.a));
        break;
    }
    returns_.push_back(ret);
  }

  void hash_into(sim::Hasher& h) const override {
    h(pc_);
    for (Word r : returns_) h(r);
  }

  std::unique_ptr<sim::SimProcess> clone() const override {
    return std::make_unique<MiniProc>(*this);
  }

  const std::vector<Word>& returns() const { return returns_; }

 private:
  std::uint32_t pid_;
  MiniProgram prog_;
  std::size_t pc_ = 0;
  std::vector<Word> returns_;
};

// Rebuild-and-replay enumeration of every schedule of a small world. The
// factory must produce identical fresh worlds; `on_terminal` sees each
// quiescent world once per distinct schedule.
inline void for_all_schedules(
    const std::function<std::unique_ptr<sim::World>()>& make,
    const std::function<void(sim::World&, const std::vector<std::uint32_t>&)>& on_terminal,
    std::size_t max_depth = 512) {
  std::vector<std::uint32_t> prefix;
  std::function<void()> rec = [&] {
    auto w = make();
    for (std::uint32_t pid : prefix) w->step(pid);
    const auto en = w->enabled();
    if (en.empty()) {
      on_terminal(*w, prefix);
      return;
    }
    if (prefix.size() >= max_depth) {
      GME_CHECK(false, "schedule enumeration exceeded max depth");
    }
    for (std::uint32_t pid : en) {
      prefix.push_back(pid);
      rec();
      prefix.pop_back();
    }
  };
  rec();
}

// Single-op drivers for the session-state fragments.
class GuardProc : public sim::SimProcess {
 public:
  GuardProc(std::uint32_t pid, Word node, Word flag) : pid_(pid), node_(node), flag_(flag) {}
  bool done() const override { return done_; }
  void step(sim::World& w) override {
    sim::SimOps ops(w, pid_);
    if (st_.step(ops, node_, flag_)) done_ = true;
  }
  void hash_into(sim::Hasher& h) const override {
    h((Word(st_.stage) << 2) | Word(done_));
    h(st_.observed);
  }
  std::unique_ptr<sim::SimProcess> clone() const override {
    return std::make_unique<GuardProc>(*this);
  }
  const GuardFlagStep& result() const { return st_; }

 private:
  std::uint32_t pid_;
  Word node_;
  Word flag_;
  GuardFlagStep st_{};
  bool done_ = false;
};

class VacantProc : public sim::SimProcess {
 public:
  VacantProc(std::uint32_t pid, Word node) : pid_(pid), node_(node) {}
  bool done() const override { return done_; }
  void step(sim::World& w) override {
    sim::SimOps ops(w, pid_);
    if (st_.step(ops, node_)) done_ = true;
  }
  void hash_into(sim::Hasher& h) const override {
    h((Word(st_.stage) << 2) | Word(done_));
    h(st_.observed);
  }
  std::unique_ptr<sim::SimProcess> clone() const override {
    return std::make_unique<VacantProc>(*this);
  }
  bool value() const { return st_.result; }

 private:
  std::uint32_t pid_;
  Word node_;
  VacantFlagStep st_{};
  bool done_ = false;
};

}  // namespace gme::testing
