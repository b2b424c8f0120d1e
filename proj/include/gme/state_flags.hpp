#pragma once

#include "gme/types.hpp"

namespace gme {

// A session is closed once both guard flags are up: the leader left and a
// conflicting request exists.
inline constexpr bool is_closed(Word state) {
  return (state & kLeaderless) && (state & kConflict);
}

// Adjourned: closed and emptied out; the list may advance past this node.
inline constexpr bool is_adjourned(Word state) { return (state & kVacant) != 0; }

inline constexpr bool is_retired(Word state) { return (state & kRetired) != 0; }

// Flag implication lattice: VACANT requires both guards, RETIRED requires all.
inline constexpr bool flags_lattice_ok(Word state) {
  if (state & kVacant) {
    if (!(state & kLeaderless) || !(state & kConflict)) return false;
  }
  if (state & kRetired) {
    if (!(state & kVacant)) return false;
  }
  return (state & ~kAllFlags) == 0;
}

}  // namespace gme
