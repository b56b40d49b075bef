#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wolf/game_state.hpp"

namespace wolf {

enum class LogEventType { GameStart, Talk, Vote, Exile, Attack, Divine, GameEnd };

std::string_view log_event_type_name(LogEventType type);
std::optional<LogEventType> parse_log_event_type(std::string_view name);

// One line of the JSONL game log. A flat tagged struct: only the fields
// relevant to `type` are meaningful, everything else stays defaulted.
// `seq` is a logical timestamp and always equals the line index, so a rerun
// with the same seed reproduces the log byte for byte.
struct LogEvent {
  LogEventType type = LogEventType::GameStart;
  int seq = 0;
  int day = 0;
  int turn = 0;                        // Talk
  AgentId actor;                       // Talk/Vote/Attack/Divine
  AgentId target;                      // Vote/Exile/Attack/Divine
  std::string text;                    // Talk
  std::optional<Species> species;      // Divine
  bool fallback = false;               // server substituted the action
  bool tied = false;                   // Exile: winner drawn from a tie
  GameConfig config;                   // GameStart
  RoleAssignment assignment;           // GameStart
  std::optional<GameOutcome> outcome;  // GameEnd

  bool operator==(const LogEvent&) const = default;

  static LogEvent game_start(GameConfig config, RoleAssignment assignment);
  static LogEvent talk(int day, int turn, AgentId speaker, std::string text, bool fallback);
  static LogEvent vote(int day, AgentId voter, AgentId target, bool fallback);
  static LogEvent exile(int day, AgentId target, bool tied);
  static LogEvent attack(int day, AgentId attacker, AgentId victim, bool fallback);
  static LogEvent divination(int day, AgentId seer, AgentId target, Species result,
                             bool fallback);
  static LogEvent game_end(GameOutcome outcome);
};

// Complete record of one game, in event order.
struct GameLog {
  std::vector<LogEvent> events;

  bool operator==(const GameLog&) const = default;

  const LogEvent& start() const;  // throws ReplayError when absent
  std::optional<GameOutcome> outcome() const;
};

void write_game_log(const GameLog& log, std::ostream& out);
void write_game_log_file(const GameLog& log, const std::filesystem::path& path);

// Throws ReplayError (with the offending line index) on malformed lines,
// unknown event types, or seq values that disagree with line order.
GameLog read_game_log(std::istream& in);
GameLog read_game_log_file(const std::filesystem::path& path);

}  // namespace wolf
