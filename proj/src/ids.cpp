#include "wolf/ids.hpp"

#include <cctype>

namespace wolf {

std::string AgentId::label() const {
  std::string out = "Agent[0";
  out += static_cast<char>('0' + index_);
  out += ']';
  return out;
}

std::array<AgentId, kNumAgents> all_agents() {
  std::array<AgentId, kNumAgents> out;
  for (int i = 0; i < kNumAgents; ++i) out[static_cast<size_t>(i)] = AgentId(i + 1);
  return out;
}

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Villager: return "VILLAGER";
    case Role::Seer: return "SEER";
    case Role::Possessed: return "POSSESSED";
    case Role::Werewolf: return "WEREWOLF";
  }
  return "VILLAGER";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "VILLAGER") return Role::Villager;
  if (name == "SEER") return Role::Seer;
  if (name == "POSSESSED") return Role::Possessed;
  if (name == "WEREWOLF") return Role::Werewolf;
  return std::nullopt;
}

std::string role_word(Role role) {
  std::string out(role_name(role));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view team_name(Team team) {
  return team == Team::Human ? "HUMAN" : "WEREWOLF_TEAM";
}

std::string_view species_name(Species s) {
  return s == Species::Human ? "human" : "werewolf";
}

std::optional<Species> parse_species(std::string_view name) {
  if (name == "human") return Species::Human;
  if (name == "werewolf") return Species::Werewolf;
  return std::nullopt;
}

std::optional<AgentId> extract_last_agent_ref(std::string_view text) {
  static constexpr std::string_view kPrefix = "Agent[";
  std::optional<AgentId> found;
  size_t pos = 0;
  while ((pos = text.find(kPrefix, pos)) != std::string_view::npos) {
    size_t cur = pos + kPrefix.size();
    pos += 1;  // resume scan one past the 'A' either way
    int value = 0;
    int digits = 0;
    while (cur < text.size() && digits < 3 &&
           std::isdigit(static_cast<unsigned char>(text[cur]))) {
      value = value * 10 + (text[cur] - '0');
      ++cur;
      ++digits;
    }
    if (digits < 1 || digits > 2) continue;
    if (cur >= text.size() || text[cur] != ']') continue;
    if (value < 1 || value > kNumAgents) continue;
    found = AgentId(value);
  }
  return found;
}

}  // namespace wolf
