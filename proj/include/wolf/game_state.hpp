#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wolf/ids.hpp"

namespace wolf {

struct GameConfig {
  int talk_turns_per_day = 5;
  uint64_t rng_seed = 0;
  std::string language_pack = "en";

  // talk_turns_per_day must stay >= 5 so the turn-3..5 persuasion schedule
  // always fits inside a day.
  void validate() const;

  bool operator==(const GameConfig&) const = default;
};

enum class PhaseKind {
  Day0Greeting,
  Night0Divine,
  DayTalk,
  NightVote,
  NightAttack,
  NightDivine,
  Finished,
};

struct Phase {
  PhaseKind kind = PhaseKind::Day0Greeting;
  int day = 0;   // 0 during the greeting and first night, else 1 or 2
  int turn = 0;  // talk turn; meaningful for DayTalk only

  bool operator==(const Phase&) const = default;
};

std::string_view phase_label(PhaseKind kind);  // "DAY_TALK", "NIGHT_VOTE", ...
std::optional<PhaseKind> parse_phase(std::string_view label);

struct TalkEntry {
  int day = 0;
  int turn = 0;
  AgentId speaker;
  std::string text;

  bool operator==(const TalkEntry&) const = default;
};

struct VoteRecord {
  int day = 0;
  AgentId voter;
  AgentId target;

  bool operator==(const VoteRecord&) const = default;
};

struct DivineRecord {
  int day = 0;  // the night's day index; night 0 is day 0
  AgentId seer;
  AgentId target;
  Species result = Species::Human;

  bool operator==(const DivineRecord&) const = default;
};

struct AttackRecord {
  int day = 0;
  AgentId attacker;
  AgentId victim;

  bool operator==(const AttackRecord&) const = default;
};

enum class WinReason { WerewolfExiled, ParityReached };
std::string_view win_reason_name(WinReason reason);
std::optional<WinReason> parse_win_reason(std::string_view name);

struct GameOutcome {
  Team winner = Team::Human;
  WinReason reason = WinReason::WerewolfExiled;

  bool operator==(const GameOutcome&) const = default;
};

using RoleAssignment = std::map<AgentId, Role>;

// Authoritative per-game world. Histories are append-only; alive shrinks
// monotonically; outcome is set exactly when phase reaches Finished.
struct GameState {
  GameConfig config;
  RoleAssignment assignment;
  std::set<AgentId> alive;
  Phase phase;
  std::vector<TalkEntry> talk_history;
  std::vector<VoteRecord> vote_history;
  std::vector<DivineRecord> divine_history;
  std::vector<AttackRecord> attack_history;
  std::vector<std::pair<int, AgentId>> exile_history;  // (day, agent)
  std::optional<GameOutcome> outcome;

  bool is_alive(AgentId id) const { return alive.count(id) > 0; }
  Role role_of(AgentId id) const;  // throws DomainError on unknown id
  AgentId werewolf() const;
  AgentId seer() const;
  std::vector<AgentId> alive_agents() const;  // ascending agent order
};

}  // namespace wolf
