#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "wolf/channel.hpp"
#include "wolf/game_log.hpp"
#include "wolf/rules.hpp"

namespace wolf {

// One seat at the table: who sits there and how long the server waits for
// each of their replies.
struct ConnectionSlot {
  AgentId id;
  std::shared_ptr<AgentChannel> channel;
  int deadline_ms = 60000;
};

// What the server does when an agent times out, disconnects, or replies
// with something unusable: talk becomes the skip token, action requests get
// a uniformly random legal target. Every substitution is flagged in the log.
struct FallbackPolicy {
  static constexpr const char* kSkipToken = "Skip";
};

// Drives one game over five channels: runs the phase machine, enforces
// per-reply deadlines, applies fallbacks, and writes every public action to
// the log. Agent misbehavior never aborts the game.
class GameServer {
 public:
  // Exactly five slots covering agents 1..5. When `preset` is given it is
  // used as the role assignment; otherwise roles are drawn from the game's
  // seeded rng.
  GameServer(GameConfig config, std::vector<ConnectionSlot> slots,
             std::optional<RoleAssignment> preset = std::nullopt);

  GameLog run();

  const GameState& state() const { return state_; }

 private:
  void append(LogEvent event);
  ConnectionSlot& slot_for(AgentId id);
  Packet packet_for(AgentId receiver, RequestKind kind, std::optional<int> turn = {},
                    std::span<const TalkEntry> pending = {}) const;
  std::optional<std::string> exchange(AgentId id, const Packet& packet);
  AgentId action_target(AgentId actor, RequestKind kind, bool& fallback);
  void run_talk_turn(int turn);
  void run_votes();
  void run_attack();
  void run_divine();
  void send_daily_initialize();
  void send_finish();

  GameConfig config_;
  std::vector<ConnectionSlot> slots_;
  std::optional<RoleAssignment> preset_;
  Rng rng_;
  GameState state_;
  GameLog log_;
};

// Convenience: build the server, run the game, hand back the log.
GameLog run_game(GameConfig config, std::vector<ConnectionSlot> slots,
                 std::optional<RoleAssignment> preset = std::nullopt);

}  // namespace wolf
