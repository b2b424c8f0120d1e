#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "gme/verify/explore.hpp"

using namespace gme;
using namespace gme::verify;
using Spec = sim::PassageDriver::Spec;

namespace {

ExploreConfig two_proc(Word s1, Word s2, bool helping, bool reclaim, bool dsm) {
  ExploreConfig cfg;
  cfg.sys.processes = 2;
  cfg.sys.instances = 1;
  cfg.sys.features = Features{helping, reclaim, dsm};
  cfg.programs = {{{1, s1}}, {{1, s2}}};
  return cfg;
}

void report(const char* name, const ExploreResult& r) {
  std::printf("  %s: states=%llu edges=%llu terminals=%llu complete=%d witness=%d\n",
              name, static_cast<unsigned long long>(r.states),
              static_cast<unsigned long long>(r.edges),
              static_cast<unsigned long long>(r.terminals), int(r.complete),
              int(r.concurrency_witnessed));
  for (const auto& v : r.violations) std::printf("  violation: %s\n", v.c_str());
}

}  // namespace

TEST_CASE("exhaustive n=2, same session: safe and concurrency witnessed") {
  const auto r = explore_exhaustive(two_proc(7, 7, true, true, false));
  report("same-session reclaim", r);
  CHECK(r.complete);
  CHECK(r.violations.empty());
  CHECK(r.terminals > 0);
  CHECK(r.concurrency_witnessed);
  CHECK(r.max_in_cs == 2);
  // Homogeneous requests: entry loop at most twice, wait body at most once.
  CHECK(r.max_outer <= 2);
  CHECK(r.max_inner <= 1);
}

TEST_CASE("exhaustive n=2, conflicting sessions: safe, never both inside") {
  const auto r = explore_exhaustive(two_proc(3, 5, true, true, false));
  report("conflict reclaim", r);
  CHECK(r.complete);
  CHECK(r.violations.empty());
  CHECK(r.terminals > 0);
  CHECK_FALSE(r.concurrency_witnessed);
  CHECK(r.max_in_cs <= 1);
}

TEST_CASE("exhaustive n=2 without reclamation") {
  const auto same = explore_exhaustive(two_proc(7, 7, true, false, false));
  report("same-session plain", same);
  CHECK(same.complete);
  CHECK(same.violations.empty());
  CHECK(same.concurrency_witnessed);

  const auto conflict = explore_exhaustive(two_proc(3, 5, true, false, false));
  report("conflict plain", conflict);
  CHECK(conflict.complete);
  CHECK(conflict.violations.empty());
  CHECK_FALSE(conflict.concurrency_witnessed);
}

TEST_CASE("exhaustive n=2 with helping off stays safe") {
  const auto same = explore_exhaustive(two_proc(7, 7, false, true, false));
  report("helping-off same", same);
  CHECK(same.complete);
  CHECK(same.violations.empty());
  CHECK(same.concurrency_witnessed);

  const auto conflict = explore_exhaustive(two_proc(3, 5, false, true, false));
  report("helping-off conflict", conflict);
  CHECK(conflict.complete);
  CHECK(conflict.violations.empty());
}

TEST_CASE("exhaustive n=2 with the DSM variant") {
  const auto same = explore_exhaustive(two_proc(7, 7, true, true, true));
  report("dsm same", same);
  CHECK(same.complete);
  CHECK(same.violations.empty());
  CHECK(same.concurrency_witnessed);

  const auto conflict = explore_exhaustive(two_proc(3, 5, true, true, true));
  report("dsm conflict", conflict);
  CHECK(conflict.complete);
  CHECK(conflict.violations.empty());
  CHECK_FALSE(conflict.concurrency_witnessed);
}

TEST_CASE("random exploration n=3: helping on and off both safe") {
  ExploreConfig cfg;
  cfg.sys.processes = 3;
  cfg.sys.instances = 1;
  cfg.sys.features = Features{true, true, false};
  cfg.programs = {{{1, 3}, {1, 5}}, {{1, 5}, {1, 3}}, {{1, 7}, {1, 7}}};

  auto on = explore_random(cfg, 1, 300, 2000000);
  CHECK(on.violations.empty());
  CHECK(on.quiescent == on.runs);
  CHECK(on.sum_estab <= on.sum_budget);

  cfg.sys.features.helping = false;
  auto off = explore_random(cfg, 1, 300, 2000000);
  CHECK(off.violations.empty());
  CHECK(off.quiescent == off.runs);
}

TEST_CASE("random exploration covers two instances with nesting-free programs") {
  ExploreConfig cfg;
  cfg.sys.processes = 3;
  cfg.sys.instances = 2;
  cfg.sys.features = Features{true, true, false};
  cfg.programs = {{{1, 3}, {2, 5}}, {{2, 5}, {1, 3}}, {{1, 7}, {2, 7}}};
  auto r = explore_random(cfg, 42, 200, 2000000);
  CHECK(r.violations.empty());
  CHECK(r.quiescent == r.runs);
}
