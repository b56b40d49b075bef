#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "wolf/game_state.hpp"
#include "wolf/rng.hpp"

namespace wolf {

// Uniformly random permutation of the fixed role deck over agents 1..5.
RoleAssignment assign_roles(const GameConfig& config, Rng& rng);

// Fresh random speaking permutation; drawn anew every talk turn.
std::vector<AgentId> speaking_order(const std::vector<AgentId>& alive, Rng& rng);

// What the seer learns: werewolf species iff the target is the werewolf.
Species divine(const RoleAssignment& assignment, AgentId target);

struct TallyResult {
  AgentId exiled;
  std::vector<AgentId> leaders;  // every candidate at the max count, ascending
  bool tie_broken() const { return leaders.size() > 1; }
};

// Picks the agent with the most votes; ties resolved uniformly from the
// seeded source. The caller records tie-break draws in the game log.
TallyResult tally_votes(const std::vector<VoteRecord>& votes, Rng& rng);

// Human team wins the moment the werewolf is exiled; the werewolf team wins
// when alive wolves reach parity with alive humans-by-species (the possessed
// counts on the human side). Otherwise the game continues.
std::optional<GameOutcome> check_winner(const GameState& state);

// Phase-completion events fed into step_phase.
struct TalkTurnDone {
  std::vector<TalkEntry> entries;  // one per alive agent, Skips included
};
struct VotesDone {
  std::vector<VoteRecord> votes;  // one per alive agent
  AgentId exiled;                 // must sit in the argmax set of the votes
};
struct AttackDone {
  AttackRecord record;
};
struct DivineDone {
  DivineRecord record;
};
using PhaseEvent = std::variant<TalkTurnDone, VotesDone, AttackDone, DivineDone>;

GameState initial_state(GameConfig config, RoleAssignment assignment);

// Pure transition function. Validates that the event matches the current
// phase (ProtocolViolation otherwise) and that its payload satisfies the
// game rules (DomainError otherwise), applies it, advances the phase:
//
//   Day0Greeting -> Night0Divine -> DayTalk(1,1..T) -> NightVote(1)
//     -> [winner check] -> NightAttack(1) -> [winner check]
//     -> NightDivine(1) -> DayTalk(2,1..T) -> NightVote(2)
//     -> [winner check] -> NightAttack(2) -> Finished
//
// A winner check that fires transitions straight to Finished; a dead seer
// skips the night divination.
GameState step_phase(GameState state, const PhaseEvent& event);

}  // namespace wolf
