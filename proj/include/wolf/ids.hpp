#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "wolf/errors.hpp"

namespace wolf {

inline constexpr int kNumAgents = 5;

// Player handle, fixed for the whole game. Rendered as "Agent[0k]" on every
// text surface: prompts, wire lines, logs, transcripts.
class AgentId {
 public:
  AgentId() = default;  // invalid until assigned
  explicit AgentId(int index) : index_(index) {
    if (index < 1 || index > kNumAgents) {
      throw DomainError("agent index out of range: " + std::to_string(index));
    }
  }

  int index() const { return index_; }
  bool valid() const { return index_ >= 1 && index_ <= kNumAgents; }
  std::string label() const;  // "Agent[01]" .. "Agent[05]"

  auto operator<=>(const AgentId&) const = default;

 private:
  int index_ = 0;
};

std::array<AgentId, kNumAgents> all_agents();

enum class Role { Villager, Seer, Possessed, Werewolf };
enum class Team { Human, WerewolfTeam };
enum class Species { Human, Werewolf };

// The fixed five-player role deck: two villagers, one seer, one possessed,
// one werewolf.
inline constexpr std::array<Role, kNumAgents> kRoleDeck = {
    Role::Werewolf, Role::Seer, Role::Possessed, Role::Villager,
    Role::Villager};

constexpr Team team_of(Role role) {
  return (role == Role::Werewolf || role == Role::Possessed)
             ? Team::WerewolfTeam
             : Team::Human;
}

// Only the werewolf inspects as werewolf; the possessed is human species.
constexpr Species species_of(Role role) {
  return role == Role::Werewolf ? Species::Werewolf : Species::Human;
}

std::string_view role_name(Role role);  // "VILLAGER", "SEER", ...
std::optional<Role> parse_role(std::string_view name);
std::string role_word(Role role);  // lowercase, for prose: "villager", ...

std::string_view team_name(Team team);  // "HUMAN", "WEREWOLF_TEAM"

std::string_view species_name(Species s);  // "human", "werewolf"
std::optional<Species> parse_species(std::string_view name);

// Finds the last "Agent[0k]" (one or two digits, value 1..5) in the text.
// Chain-of-thought answers end with their conclusion, so the final mention
// is taken as the decision.
std::optional<AgentId> extract_last_agent_ref(std::string_view text);

}  // namespace wolf
