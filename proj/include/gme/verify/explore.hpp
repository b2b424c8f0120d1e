#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gme/sim/driver.hpp"

namespace gme::verify {

struct ExploreConfig {
  SystemConfig sys;
  std::vector<std::vector<sim::PassageDriver::Spec>> programs;
  std::uint32_t cs_steps = 1;
  std::uint64_t max_states = 8'000'000;
  bool hazard_audit = true;
  // Hash the per-passage contention counters into the explored state. On
  // large instances turning this off collapses window-history variety; the
  // contention bound checks then cover the DFS tree's paths.
  bool hash_contention_counters = true;
};

// Exhaustive interleaving enumeration via memoized state-space DFS: every
// reachable state is visited once and every reachable transition executed
// once. Invariants are checked at each state and transition.
struct ExploreResult {
  std::uint64_t states = 0;
  std::uint64_t edges = 0;
  std::uint64_t terminals = 0;
  bool complete = true;  // false if max_states was hit
  bool concurrency_witnessed = false;
  std::uint32_t max_in_cs = 0;
  std::uint32_t max_outer = 0;
  std::uint32_t max_inner = 0;
  std::vector<std::string> violations;
  // A schedule prefix replaying the first violation (process ids).
  std::vector<std::uint32_t> counterexample;
};
ExploreResult explore_exhaustive(const ExploreConfig& cfg);

// Seeded random schedules, full paths, with the same checks plus run-level
// accounting (quiescence, iteration maxima, amortized sums).
struct RandomExploreResult {
  std::uint64_t runs = 0;
  std::uint64_t quiescent = 0;
  bool concurrency_witnessed = false;
  std::uint32_t max_outer = 0;
  std::uint32_t max_inner = 0;
  std::uint64_t sum_estab = 0;
  std::uint64_t sum_budget = 0;  // sum of (cdot + 1)
  std::vector<std::string> violations;
  std::uint64_t first_bad_seed = 0;
};
RandomExploreResult explore_random(const ExploreConfig& cfg, std::uint64_t first_seed,
                                   std::uint64_t seed_count, std::uint64_t max_steps);

}  // namespace gme::verify
