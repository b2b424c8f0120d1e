#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>

namespace gme {

// Everything shared between processes fits in one machine word: packed flag
// sets, signed counters, and node references (table indices, 0 = null).
using Word = std::uint64_t;

inline constexpr Word kNullNode = 0;

// Session id 0 is reserved for the dummy head nodes; requests may use any
// nonzero word.
inline constexpr Word kSessionNone = 0;

// Owner id 0 marks a node owned by its GME instance (the initial dummies).
inline constexpr Word kOwnerInstance = 0;

// Session-state flags, packed into one word.
inline constexpr Word kLeaderless = 1u << 0;
inline constexpr Word kConflict = 1u << 1;
inline constexpr Word kVacant = 1u << 2;
inline constexpr Word kRetired = 1u << 3;
inline constexpr Word kAllFlags = kLeaderless | kConflict | kVacant | kRetired;

// Reclamation condition of a node.
inline constexpr Word kCondSafe = 1;
inline constexpr Word kCondUnsafe = 2;
inline constexpr Word kCondUnknown = 3;

struct Features {
  bool helping = true;  // round-robin helping (starvation freedom)
  bool reclaim = true;  // pooled nodes + lazy cleanup instead of allocation
  bool dsm = false;     // local-spin wait with notification
};

struct SystemConfig {
  std::uint32_t processes = 1;  // n, process ids 1..n
  std::uint32_t instances = 1;  // m, instance ids 1..m
  Features features{};
};

// Pool geometry: two pools of 3n nodes per process.
inline constexpr std::uint32_t pool_slots(std::uint32_t n) { return 3 * n; }

// Total nodes preallocated by the reclaiming build: one dummy per instance
// plus 2 * 3n nodes per process.
inline constexpr std::uint64_t preallocated_nodes(std::uint32_t n, std::uint32_t m) {
  return static_cast<std::uint64_t>(m) + 6ull * n * n;
}

// Round-robin helping cursor. Successive applications cycle through 1..n,
// visiting every process id within n steps.
inline constexpr std::uint32_t next_help_index(std::uint64_t k, std::uint32_t n) {
  return static_cast<std::uint32_t>(k % n) + 1;
}

// Always-on invariant check; breaches indicate an algorithm bug, never a
// user error, so we abort loudly even in release builds.
#define GME_CHECK(cond, msg)                                                        \
  do {                                                                              \
    if (!(cond)) {                                                                  \
      std::fprintf(stderr, "gme: invariant violated: %s (%s:%d)\n", msg, __FILE__,  \
                   __LINE__);                                                       \
      std::abort();                                                                 \
    }                                                                               \
  } while (0)

}  // namespace gme
