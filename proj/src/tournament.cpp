#include "wolf/tournament.hpp"

#include <cinttypes>
#include <cstdio>
#include <iostream>

#include "wolf/errors.hpp"

namespace wolf {

std::string_view rotation_policy_name(RotationPolicy policy) {
  return policy == RotationPolicy::LatinSquare ? "latin" : "random";
}

std::optional<RotationPolicy> parse_rotation_policy(std::string_view name) {
  if (name == "latin") return RotationPolicy::LatinSquare;
  if (name == "random") return RotationPolicy::RandomShuffle;
  return std::nullopt;
}

RoleAssignment rotated_assignment(RotationPolicy policy, int game_index,
                                  uint64_t game_seed) {
  RoleAssignment assignment;
  if (policy == RotationPolicy::LatinSquare) {
    for (int k = 1; k <= kNumAgents; ++k) {
      const int deck_index = ((k - 1) + game_index) % kNumAgents;
      assignment[AgentId(k)] = kRoleDeck[static_cast<size_t>(deck_index)];
    }
    return assignment;
  }
  std::vector<Role> deck(kRoleDeck.begin(), kRoleDeck.end());
  Rng shuffle_rng(Rng::mix(game_seed, 0xD0'5EA7));  // distinct from the server stream
  shuffle_rng.shuffle(deck);
  for (int k = 1; k <= kNumAgents; ++k)
    assignment[AgentId(k)] = deck[static_cast<size_t>(k - 1)];
  return assignment;
}

LocalGameParts make_local_game(
    uint64_t game_seed, std::shared_ptr<const PromptLibrary> library,
    const std::function<std::shared_ptr<ChatBackend>(AgentId)>& backend_for,
    RetryPolicy retry, const TapFactory& tap_for) {
  if (!backend_for) throw DomainError("make_local_game needs a backend factory");
  LocalGameParts parts;
  for (AgentId id : all_agents()) {
    auto backend = backend_for(id);
    if (!backend) throw DomainError("backend factory returned null for " + id.label());
    auto agent = std::make_shared<Agent>(std::move(backend), library,
                                         Rng::mix(game_seed, static_cast<uint64_t>(id.index())),
                                         retry);
    PacketTap tap = tap_for ? tap_for(id) : PacketTap{};
    ConnectionSlot slot;
    slot.id = id;
    slot.channel = std::make_shared<LocalChannel>(agent, std::move(tap));
    parts.slots.push_back(std::move(slot));
    parts.agents.push_back(std::move(agent));
  }
  return parts;
}

TournamentResult run_tournament(const TournamentConfig& config,
                                std::shared_ptr<const PromptLibrary> library,
                                const BackendFactory& backend_for) {
  if (config.games <= 0) throw DomainError("tournament needs a positive game count");
  if (!backend_for) throw DomainError("tournament needs a backend factory");
  if (!config.log_dir.empty()) std::filesystem::create_directories(config.log_dir);

  TournamentResult result;
  for (int i = 0; i < config.games; ++i) {
    const uint64_t game_seed = Rng::mix(config.seed, static_cast<uint64_t>(i));
    GameConfig game_config = config.game;
    game_config.rng_seed = game_seed;

    try {
      LocalGameParts parts = make_local_game(
          game_seed, library, [&](AgentId id) { return backend_for(i, id); });
      RoleAssignment assignment = rotated_assignment(config.rotation, i, game_seed);
      GameLog log = run_game(game_config, std::move(parts.slots), assignment);

      if (!config.log_dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof(name), "game_%05d.jsonl", i);
        write_game_log_file(log, config.log_dir / name);
      }
      result.logs.push_back(std::move(log));
      ++result.games_played;
    } catch (const std::exception& err) {
      std::cerr << "warning: game " << i << " aborted and excluded: " << err.what()
                << "\n";
      ++result.games_aborted;
    }
  }
  return result;
}

std::vector<WinRateRow> compute_win_rates(const std::vector<GameLog>& logs,
                                          const SeatTeamMap& seat_team) {
  std::map<std::string, WinRateRow> rows;
  auto row_for = [&rows](const std::string& label) -> WinRateRow& {
    auto [it, inserted] = rows.try_emplace(label);
    if (inserted) it->second.team_label = label;
    return it->second;
  };

  for (const auto& log : logs) {
    auto outcome = log.outcome();
    if (!outcome) throw ReplayError("log without a final outcome cannot be scored");
    const LogEvent& start = log.start();

    for (const auto& [id, role] : start.assignment) {
      auto owner = seat_team.find(id);
      if (owner == seat_team.end()) continue;
      const bool won = team_of(role) == outcome->winner;
      WinRateRow& row = row_for(owner->second);
      RoleTally& cell = row.by_role[static_cast<size_t>(role)];
      cell.games += 1;
      row.totals.games += 1;
      if (won) {
        cell.wins += 1;
        row.totals.wins += 1;
      }
    }
  }

  std::vector<WinRateRow> out;
  out.reserve(rows.size());
  for (auto& [_, row] : rows) out.push_back(std::move(row));
  return out;  // std::map iteration already sorts by label
}

std::vector<WinRateRow> compute_win_rates(const std::vector<GameLog>& logs,
                                          const std::string& label) {
  SeatTeamMap seats;
  for (AgentId id : all_agents()) seats[id] = label;
  return compute_win_rates(logs, seats);
}

std::string format_rate_percent(int wins, int games) {
  if (games <= 0) return "n/a";
  if (wins < 0 || wins > games) throw DomainError("win count outside [0, games]");
  // Exact integer arithmetic: scale to basis points, divide, round half up.
  const long long scaled = static_cast<long long>(wins) * 10000;
  long long q = scaled / games;
  const long long r = scaled % games;
  if (2 * r >= games) ++q;
  char out[24];
  std::snprintf(out, sizeof(out), "%lld.%02lld%%", q / 100, q % 100);
  return out;
}

std::string render_rate_table(const std::vector<WinRateRow>& rows) {
  // One line per label, one cell per role in a fixed column order, then the
  // overall tally. Column order follows the usual tournament-table layout.
  static constexpr Role kColumnOrder[] = {Role::Possessed, Role::Seer, Role::Villager,
                                          Role::Werewolf};
  std::string out = "label           POSSESSED             SEER                  "
                    "VILLAGER              WEREWOLF              TOTAL\n";
  auto cell = [](const RoleTally& tally) {
    char text[40];
    std::snprintf(text, sizeof(text), "%3d/%-4d %8s   ", tally.wins, tally.games,
                  format_rate_percent(tally.wins, tally.games).c_str());
    return std::string(text);
  };
  for (const auto& row : rows) {
    char label[24];
    std::snprintf(label, sizeof(label), "%-15s ", row.team_label.c_str());
    out += label;
    for (Role role : kColumnOrder) out += cell(row.by_role[static_cast<size_t>(role)]);
    out += cell(row.totals);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

}  // namespace wolf
