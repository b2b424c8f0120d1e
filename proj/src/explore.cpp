#include "gme/verify/explore.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

namespace gme::verify {

namespace {

struct StateKey {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool operator==(const StateKey& o) const { return a == o.a && b == o.b; }
};
struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    return k.a ^ (k.b * 0x9e3779b97f4a7c15ull);
  }
};

const sim::PassageDriver* driver(const sim::World& w, std::uint32_t pid) {
  return dynamic_cast<const sim::PassageDriver*>(
      &const_cast<sim::World&>(w).process(pid));
}

// Per-state GME check over driver phases: all critical sections concurrently
// open on one instance must request the same session.
bool state_gme_ok(sim::World& w, bool* witness, std::uint32_t* in_cs_max,
                  std::string* detail) {
  const std::uint32_t n = w.process_count();
  for (std::uint32_t i = 1; i <= n; ++i) {
    std::uint32_t inst_i = 0;
    Word sess_i = 0;
    const auto* di = driver(w, i);
    if (!di || !di->in_cs(&inst_i, &sess_i)) continue;
    std::uint32_t same = 1;
    for (std::uint32_t j = i + 1; j <= n; ++j) {
      std::uint32_t inst_j = 0;
      Word sess_j = 0;
      const auto* dj = driver(w, j);
      if (!dj || !dj->in_cs(&inst_j, &sess_j)) continue;
      if (inst_i != inst_j) continue;
      if (sess_i != sess_j) {
        *detail = "processes " + std::to_string(i) + " and " + std::to_string(j) +
                  " in CS on instance " + std::to_string(inst_i) +
                  " with sessions " + std::to_string(sess_i) + " and " +
                  std::to_string(sess_j);
        return false;
      }
      ++same;
    }
    if (same >= 2) *witness = true;
    *in_cs_max = std::max(*in_cs_max, same);
  }
  return true;
}

void collect_driver_maxima(sim::World& w, std::uint32_t* max_outer,
                           std::uint32_t* max_inner) {
  for (std::uint32_t p = 1; p <= w.process_count(); ++p) {
    if (const auto* d = driver(w, p)) {
      *max_outer = std::max(*max_outer, d->max_outer());
      *max_inner = std::max(*max_inner, d->max_inner());
    }
  }
}

// Checks applicable once all processes are quiescent.
void terminal_checks(sim::World& w, std::vector<std::string>* violations) {
  std::uint64_t estab = 0;
  std::uint64_t budget = 0;
  for (std::uint32_t p = 1; p <= w.process_count(); ++p) {
    if (const auto* d = driver(w, p)) {
      estab += d->sum_estab();
      budget += d->sum_cdot_plus1();
    }
  }
  if (w.config().features.helping && estab > budget) {
    violations->push_back("amortized context-switch budget exceeded: " +
                          std::to_string(estab) + " > " + std::to_string(budget));
  }
  if (w.config().features.reclaim && !w.pool_membership_ok()) {
    violations->push_back("pool membership audit failed at quiescence");
  }
  if (w.audit() && w.audit()->violations() != 0) {
    violations->push_back("hazard reuse audit reported " +
                          std::to_string(w.audit()->violations()) + " violations");
  }
}

std::unique_ptr<sim::World> build(const ExploreConfig& cfg) {
  auto w = sim::make_passage_world(cfg.sys, cfg.programs, cfg.cs_steps);
  if (cfg.hazard_audit && cfg.sys.features.reclaim) w->enable_hazard_audit();
  if (!cfg.hash_contention_counters) {
    for (std::uint32_t p = 1; p <= cfg.sys.processes; ++p) {
      if (auto* d = dynamic_cast<sim::PassageDriver*>(&w->process(p))) {
        d->set_hash_contention(false);
      }
    }
  }
  return w;
}

}  // namespace

ExploreResult explore_exhaustive(const ExploreConfig& cfg) {
  ExploreResult res;
  auto wp = build(cfg);
  sim::World& w = *wp;

  std::unordered_set<StateKey, StateKeyHash> visited;
  visited.reserve(1 << 16);

  struct Frame {
    sim::World::Snapshot snap;
    std::vector<std::uint32_t> en;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  std::vector<std::uint32_t> path;

  auto record_violation = [&](const std::vector<std::string>& msgs,
                              std::uint32_t last_pid) {
    res.violations = msgs;
    res.counterexample = path;
    res.counterexample.push_back(last_pid);
  };

  {
    const auto h = w.state_hash();
    visited.insert({h.first, h.second});
    res.states = 1;
    std::string detail;
    if (!state_gme_ok(w, &res.concurrency_witnessed, &res.max_in_cs, &detail)) {
      res.violations.push_back("GME violated in initial state: " + detail);
      return res;
    }
    auto en = w.enabled();
    if (en.empty()) {
      ++res.terminals;
      return res;
    }
    stack.push_back(Frame{w.snapshot(), std::move(en), 0});
  }

  bool world_at_top = true;  // world state equals stack.back()'s snapshot
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next >= f.en.size()) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      world_at_top = false;
      continue;
    }
    const std::uint32_t pid = f.en[f.next++];
    if (!world_at_top) w.restore(f.snap);
    world_at_top = false;

    const std::size_t viol_before = w.violations().size();
    w.step(pid);
    ++res.edges;
    if (w.violations().size() > viol_before) {
      record_violation(w.violations(), pid);
      return res;
    }

    const auto h = w.state_hash();
    if (!visited.insert({h.first, h.second}).second) continue;
    ++res.states;

    std::string detail;
    if (!state_gme_ok(w, &res.concurrency_witnessed, &res.max_in_cs, &detail)) {
      record_violation({"GME violated: " + detail}, pid);
      return res;
    }
    if (res.states >= cfg.max_states) {
      res.complete = false;
      return res;
    }

    auto en = w.enabled();
    if (en.empty()) {
      ++res.terminals;
      collect_driver_maxima(w, &res.max_outer, &res.max_inner);
      std::vector<std::string> term;
      terminal_checks(w, &term);
      if (!term.empty()) {
        record_violation(term, pid);
        return res;
      }
      continue;
    }
    stack.push_back(Frame{w.snapshot(), std::move(en), 0});
    path.push_back(pid);
    world_at_top = true;
  }
  return res;
}

RandomExploreResult explore_random(const ExploreConfig& cfg, std::uint64_t first_seed,
                                   std::uint64_t seed_count, std::uint64_t max_steps) {
  RandomExploreResult res;
  for (std::uint64_t s = 0; s < seed_count; ++s) {
    const std::uint64_t seed = first_seed + s;
    auto wp = build(cfg);
    sim::World& w = *wp;
    std::mt19937_64 rng(seed);
    ++res.runs;

    bool bad = false;
    for (std::uint64_t i = 0; i < max_steps; ++i) {
      auto en = w.enabled();
      if (en.empty()) break;
      const std::uint32_t pid =
          en[std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng)];
      w.step(pid);
      if (!w.violations().empty()) {
        res.violations = w.violations();
        res.first_bad_seed = seed;
        bad = true;
        break;
      }
      std::string detail;
      std::uint32_t in_cs = 0;
      if (!state_gme_ok(w, &res.concurrency_witnessed, &in_cs, &detail)) {
        res.violations.push_back("GME violated: " + detail);
        res.first_bad_seed = seed;
        bad = true;
        break;
      }
    }
    if (bad) return res;
    if (w.all_done()) {
      ++res.quiescent;
      std::vector<std::string> term;
      terminal_checks(w, &term);
      if (!term.empty()) {
        res.violations = term;
        res.first_bad_seed = seed;
        return res;
      }
      for (std::uint32_t p = 1; p <= w.process_count(); ++p) {
        if (const auto* d = driver(w, p)) {
          res.sum_estab += d->sum_estab();
          res.sum_budget += d->sum_cdot_plus1();
        }
      }
    }
    collect_driver_maxima(w, &res.max_outer, &res.max_inner);
  }
  return res;
}

}  // namespace gme::verify
