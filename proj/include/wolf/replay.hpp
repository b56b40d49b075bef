#pragma once

#include <string>
#include <vector>

#include "wolf/game_log.hpp"
#include "wolf/rules.hpp"

namespace wolf {

struct ReplayCheck {
  GameState final_state;
  std::vector<Phase> phase_trace;  // phase after every applied event
};

// Re-simulates the log through the rules engine and cross-checks every
// event against it: exiles must sit in the recomputed argmax set (and the
// tied flag must match), divination results must match the target's true
// species, and the recorded outcome must equal the engine's. Throws
// ReplayError carrying the offending event index.
ReplayCheck verify_replay(const GameLog& log);

// Human-readable transcript of a log; stable byte-for-byte for a given log.
std::string render_replay(const GameLog& log);

}  // namespace wolf
