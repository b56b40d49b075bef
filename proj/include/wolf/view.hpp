#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wolf/game_state.hpp"

namespace wolf {

enum class AgentStatus { Alive, Exiled, Attacked };

const char* agent_status_name(AgentStatus status);
AgentStatus parse_agent_status(const std::string& text);

// Everything one agent is allowed to know at a point in the game. Built
// fresh for every request; nothing here leaks another agent's role.
struct GameInfoView {
  int day = 0;
  PhaseKind phase = PhaseKind::Day0Greeting;
  AgentId receiver;
  Role receiver_role = Role::Villager;
  std::map<AgentId, AgentStatus> status_map;
  std::vector<TalkEntry> talk_list;        // public record, oldest first
  std::vector<DivineRecord> divine_results;  // own divinations; empty unless seer
  std::optional<AgentId> executed;  // most recent exile, if any
  std::optional<AgentId> attacked;  // most recent night kill, if any

  bool operator==(const GameInfoView&) const = default;
};

// `pending` carries talk entries from the in-progress turn that are not yet
// committed to the state, so later speakers in a turn see earlier ones.
GameInfoView build_game_info_view(const GameState& state, AgentId receiver,
                                  std::span<const TalkEntry> pending = {});

}  // namespace wolf
