#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wolf/agent.hpp"
#include "wolf/server.hpp"

namespace wolf {

// How roles move between seats across a tournament.
//   LatinSquare: seat k plays deck[(k-1+i) % 5] in game i, so every seat
//                holds every role equally often when games % 5 == 0.
//   RandomShuffle: a fresh seeded shuffle per game.
enum class RotationPolicy { LatinSquare, RandomShuffle };

std::string_view rotation_policy_name(RotationPolicy policy);
std::optional<RotationPolicy> parse_rotation_policy(std::string_view name);

// The role deck a given game deals to seats 1..5 under a policy.
RoleAssignment rotated_assignment(RotationPolicy policy, int game_index,
                                  uint64_t game_seed);

struct TournamentConfig {
  int games = 40;
  uint64_t seed = 1;
  RotationPolicy rotation = RotationPolicy::LatinSquare;
  GameConfig game;                 // per-game settings; rng_seed is overwritten
  std::filesystem::path log_dir;   // empty: keep logs in memory only
};

// Builds the backend for one seat of one game. Games run sequentially, so
// the factory may reuse state between calls.
using BackendFactory =
    std::function<std::shared_ptr<ChatBackend>(int game_index, AgentId id)>;

struct TournamentResult {
  int games_played = 0;
  int games_aborted = 0;
  std::vector<GameLog> logs;  // completed games, in play order
};

// Runs config.games sequential games over in-process agents. Game i derives
// its seed from the tournament seed, each agent from the game seed, so a
// rerun reproduces every log byte for byte. A game that throws is reported
// to stderr, counted as aborted and excluded from the logs.
TournamentResult run_tournament(const TournamentConfig& config,
                                std::shared_ptr<const PromptLibrary> library,
                                const BackendFactory& backend_for);

// One in-process table: five seeded agents wired to slots.
struct LocalGameParts {
  std::vector<ConnectionSlot> slots;
  std::vector<std::shared_ptr<Agent>> agents;  // in agent-id order
};

using TapFactory = std::function<PacketTap(AgentId)>;

LocalGameParts make_local_game(
    uint64_t game_seed, std::shared_ptr<const PromptLibrary> library,
    const std::function<std::shared_ptr<ChatBackend>(AgentId)>& backend_for,
    RetryPolicy retry = RetryPolicy{2, 0}, const TapFactory& tap_for = nullptr);

// ---- Win-rate reporting ----

inline constexpr int kNumRoles = 4;

struct RoleTally {
  int wins = 0;
  int games = 0;

  bool operator==(const RoleTally&) const = default;
};

// One scored line: every seat mapped to this label contributes one game per
// log to the role it held there, and a win when its team took the game.
struct WinRateRow {
  std::string team_label;
  std::array<RoleTally, kNumRoles> by_role{};  // indexed by static_cast<int>(Role)
  RoleTally totals;
};

// Which scoring label owns each seat. Seats left out of the map are not
// counted, so a single competitor can be scored inside mixed games.
using SeatTeamMap = std::map<AgentId, std::string>;

// Tabulates finished logs into one row per label, sorted by label. Logs
// without an outcome are rejected with ReplayError; no logs, no rows.
std::vector<WinRateRow> compute_win_rates(const std::vector<GameLog>& logs,
                                          const SeatTeamMap& seat_team);

// Self-play shorthand: every seat under one label.
std::vector<WinRateRow> compute_win_rates(const std::vector<GameLog>& logs,
                                          const std::string& label = "self-play");

// Exact percentage with two decimals, rounding half away from zero done in
// integer arithmetic: 32 of 58 -> "55.17%". Zero games -> "n/a".
std::string format_rate_percent(int wins, int games);

std::string render_rate_table(const std::vector<WinRateRow>& rows);

}  // namespace wolf
