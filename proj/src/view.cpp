#include "wolf/view.hpp"

#include <set>

#include "wolf/errors.hpp"

namespace wolf {

const char* agent_status_name(AgentStatus status) {
  switch (status) {
    case AgentStatus::Alive: return "ALIVE";
    case AgentStatus::Exiled: return "EXILED";
    case AgentStatus::Attacked: return "ATTACKED";
  }
  throw DomainError("agent_status_name: bad enum value");
}

AgentStatus parse_agent_status(const std::string& text) {
  if (text == "ALIVE") return AgentStatus::Alive;
  if (text == "EXILED") return AgentStatus::Exiled;
  if (text == "ATTACKED") return AgentStatus::Attacked;
  throw DomainError("parse_agent_status: unknown status '" + text + "'");
}

GameInfoView build_game_info_view(const GameState& state, AgentId receiver,
                                  std::span<const TalkEntry> pending) {
  if (!receiver.valid()) throw DomainError("build_game_info_view: invalid receiver");

  GameInfoView view;
  view.day = state.phase.day;
  view.phase = state.phase.kind;
  view.receiver = receiver;
  view.receiver_role = state.role_of(receiver);

  std::set<AgentId> exiled;
  for (const auto& [day, id] : state.exile_history) {
    (void)day;
    exiled.insert(id);
  }
  for (AgentId id : all_agents()) {
    if (state.is_alive(id))
      view.status_map[id] = AgentStatus::Alive;
    else if (exiled.count(id))
      view.status_map[id] = AgentStatus::Exiled;
    else
      view.status_map[id] = AgentStatus::Attacked;
  }

  view.talk_list = state.talk_history;
  view.talk_list.insert(view.talk_list.end(), pending.begin(), pending.end());

  if (view.receiver_role == Role::Seer) {
    for (const auto& record : state.divine_history)
      if (record.seer == receiver) view.divine_results.push_back(record);
  }

  if (!state.exile_history.empty()) view.executed = state.exile_history.back().second;
  if (!state.attack_history.empty()) view.attacked = state.attack_history.back().victim;

  return view;
}

}  // namespace wolf
