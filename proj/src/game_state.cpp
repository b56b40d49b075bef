#include "wolf/game_state.hpp"

#include "wolf/errors.hpp"

namespace wolf {

void GameConfig::validate() const {
  if (talk_turns_per_day < 5) {
    throw DomainError("talk_turns_per_day must be >= 5, got " +
                      std::to_string(talk_turns_per_day));
  }
  if (language_pack.empty()) {
    throw DomainError("language_pack must not be empty");
  }
}

std::string_view phase_label(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::Day0Greeting: return "DAY0_GREETING";
    case PhaseKind::Night0Divine: return "NIGHT0_DIVINE";
    case PhaseKind::DayTalk: return "DAY_TALK";
    case PhaseKind::NightVote: return "NIGHT_VOTE";
    case PhaseKind::NightAttack: return "NIGHT_ATTACK";
    case PhaseKind::NightDivine: return "NIGHT_DIVINE";
    case PhaseKind::Finished: return "FINISHED";
  }
  return "FINISHED";
}

std::optional<PhaseKind> parse_phase(std::string_view label) {
  if (label == "DAY0_GREETING") return PhaseKind::Day0Greeting;
  if (label == "NIGHT0_DIVINE") return PhaseKind::Night0Divine;
  if (label == "DAY_TALK") return PhaseKind::DayTalk;
  if (label == "NIGHT_VOTE") return PhaseKind::NightVote;
  if (label == "NIGHT_ATTACK") return PhaseKind::NightAttack;
  if (label == "NIGHT_DIVINE") return PhaseKind::NightDivine;
  if (label == "FINISHED") return PhaseKind::Finished;
  return std::nullopt;
}

std::string_view win_reason_name(WinReason reason) {
  return reason == WinReason::WerewolfExiled ? "WEREWOLF_EXILED"
                                             : "PARITY_REACHED";
}

std::optional<WinReason> parse_win_reason(std::string_view name) {
  if (name == "WEREWOLF_EXILED") return WinReason::WerewolfExiled;
  if (name == "PARITY_REACHED") return WinReason::ParityReached;
  return std::nullopt;
}

Role GameState::role_of(AgentId id) const {
  auto it = assignment.find(id);
  if (it == assignment.end()) {
    throw DomainError("unknown agent: " + std::to_string(id.index()));
  }
  return it->second;
}

AgentId GameState::werewolf() const {
  for (const auto& [id, role] : assignment) {
    if (role == Role::Werewolf) return id;
  }
  throw DomainError("assignment has no werewolf");
}

AgentId GameState::seer() const {
  for (const auto& [id, role] : assignment) {
    if (role == Role::Seer) return id;
  }
  throw DomainError("assignment has no seer");
}

std::vector<AgentId> GameState::alive_agents() const {
  return {alive.begin(), alive.end()};
}

}  // namespace wolf
