#include "wolf/server.hpp"

#include <algorithm>
#include <set>

#include "wolf/errors.hpp"
#include "wolf/view.hpp"

namespace wolf {

GameServer::GameServer(GameConfig config, std::vector<ConnectionSlot> slots,
                       std::optional<RoleAssignment> preset)
    : config_(std::move(config)),
      slots_(std::move(slots)),
      preset_(std::move(preset)),
      rng_(config_.rng_seed) {
  config_.validate();
  if (slots_.size() != static_cast<size_t>(kNumAgents))
    throw DomainError("server needs exactly five connection slots");
  std::set<AgentId> seen;
  for (const auto& slot : slots_) {
    if (!slot.id.valid()) throw DomainError("connection slot with invalid agent id");
    if (!slot.channel) throw DomainError("connection slot without a channel");
    if (slot.deadline_ms <= 0) throw DomainError("connection slot deadline must be positive");
    if (!seen.insert(slot.id).second)
      throw DomainError("duplicate connection slot for " + slot.id.label());
  }
  std::sort(slots_.begin(), slots_.end(),
            [](const ConnectionSlot& a, const ConnectionSlot& b) { return a.id < b.id; });
}

void GameServer::append(LogEvent event) {
  event.seq = static_cast<int>(log_.events.size());
  log_.events.push_back(std::move(event));
}

ConnectionSlot& GameServer::slot_for(AgentId id) {
  for (auto& slot : slots_)
    if (slot.id == id) return slot;
  throw DomainError("no slot for " + id.label());
}

Packet GameServer::packet_for(AgentId receiver, RequestKind kind, std::optional<int> turn,
                              std::span<const TalkEntry> pending) const {
  Packet packet;
  packet.request = kind;
  packet.game_info = build_game_info_view(state_, receiver, pending);
  packet.turn = turn;
  return packet;
}

std::optional<std::string> GameServer::exchange(AgentId id, const Packet& packet) {
  ConnectionSlot& slot = slot_for(id);
  slot.channel->send(packet);
  if (!requires_response(packet.request)) return std::nullopt;
  return slot.channel->recv_line(slot.deadline_ms);
}

// Uniformly random legal target for a substituted vote/divine/attack.
AgentId GameServer::action_target(AgentId actor, RequestKind kind, bool& fallback) {
  (void)kind;
  fallback = true;
  std::vector<AgentId> candidates;
  for (AgentId id : state_.alive_agents())
    if (id != actor) candidates.push_back(id);
  if (candidates.empty()) throw DomainError("no legal fallback target for " + actor.label());
  return rng_.pick(candidates);
}

void GameServer::run_talk_turn(int turn) {
  auto order = speaking_order(state_.alive_agents(), rng_);
  std::vector<TalkEntry> pending;
  std::vector<bool> substituted;
  for (AgentId speaker : order) {
    Packet packet = packet_for(speaker, RequestKind::Talk, turn, pending);
    auto line = exchange(speaker, packet);
    bool fallback = false;
    std::string text;
    if (line) {
      try {
        text = decode_response(RequestKind::Talk, *line).text;
      } catch (const MalformedResponse&) {
        fallback = true;
      }
    } else {
      fallback = true;
    }
    if (fallback) text = FallbackPolicy::kSkipToken;
    pending.push_back(TalkEntry{state_.phase.day, turn, speaker, std::move(text)});
    substituted.push_back(fallback);
  }
  state_ = step_phase(std::move(state_), TalkTurnDone{pending});
  for (size_t i = 0; i < pending.size(); ++i)
    append(LogEvent::talk(pending[i].day, pending[i].turn, pending[i].speaker,
                          pending[i].text, substituted[i]));
}

void GameServer::run_votes() {
  const int day = state_.phase.day;
  std::vector<VoteRecord> votes;
  std::vector<bool> substituted;
  for (AgentId voter : state_.alive_agents()) {
    Packet packet = packet_for(voter, RequestKind::Vote);
    auto line = exchange(voter, packet);
    bool fallback = false;
    AgentId target;
    if (line) {
      try {
        AgentId claimed = decode_response(RequestKind::Vote, *line).target;
        if (claimed != voter && state_.is_alive(claimed))
          target = claimed;
        else
          target = action_target(voter, RequestKind::Vote, fallback);
      } catch (const MalformedResponse&) {
        target = action_target(voter, RequestKind::Vote, fallback);
      }
    } else {
      target = action_target(voter, RequestKind::Vote, fallback);
    }
    votes.push_back(VoteRecord{day, voter, target});
    substituted.push_back(fallback);
  }

  TallyResult tally = tally_votes(votes, rng_);
  state_ = step_phase(std::move(state_), VotesDone{votes, tally.exiled});
  for (size_t i = 0; i < votes.size(); ++i)
    append(LogEvent::vote(day, votes[i].voter, votes[i].target, substituted[i]));
  append(LogEvent::exile(day, tally.exiled, tally.tie_broken()));
}

void GameServer::run_attack() {
  const int day = state_.phase.day;
  AgentId wolf = state_.werewolf();
  Packet packet = packet_for(wolf, RequestKind::Attack);
  auto line = exchange(wolf, packet);
  bool fallback = false;
  AgentId victim;
  if (line) {
    try {
      AgentId claimed = decode_response(RequestKind::Attack, *line).target;
      if (claimed != wolf && state_.is_alive(claimed))
        victim = claimed;
      else
        victim = action_target(wolf, RequestKind::Attack, fallback);
    } catch (const MalformedResponse&) {
      victim = action_target(wolf, RequestKind::Attack, fallback);
    }
  } else {
    victim = action_target(wolf, RequestKind::Attack, fallback);
  }
  AttackRecord record{day, wolf, victim};
  state_ = step_phase(std::move(state_), AttackDone{record});
  append(LogEvent::attack(day, wolf, victim, fallback));
}

void GameServer::run_divine() {
  const int day = state_.phase.day;
  AgentId seer = state_.seer();
  Packet packet = packet_for(seer, RequestKind::Divine);
  auto line = exchange(seer, packet);
  bool fallback = false;
  AgentId target;
  if (line) {
    try {
      AgentId claimed = decode_response(RequestKind::Divine, *line).target;
      if (claimed != seer && state_.is_alive(claimed))
        target = claimed;
      else
        target = action_target(seer, RequestKind::Divine, fallback);
    } catch (const MalformedResponse&) {
      target = action_target(seer, RequestKind::Divine, fallback);
    }
  } else {
    target = action_target(seer, RequestKind::Divine, fallback);
  }
  DivineRecord record{day, seer, target, divine(state_.assignment, target)};
  state_ = step_phase(std::move(state_), DivineDone{record});
  append(LogEvent::divination(day, seer, target, record.result, fallback));
}

void GameServer::send_daily_initialize() {
  for (AgentId id : state_.alive_agents())
    exchange(id, packet_for(id, RequestKind::DailyInitialize));
}

void GameServer::send_finish() {
  for (const auto& slot : slots_)
    slot_for(slot.id).channel->send(packet_for(slot.id, RequestKind::Finish));
}

GameLog GameServer::run() {
  RoleAssignment assignment = preset_ ? *preset_ : assign_roles(config_, rng_);
  state_ = initial_state(config_, assignment);
  log_ = GameLog{};
  append(LogEvent::game_start(config_, assignment));

  for (const auto& slot : slots_)
    exchange(slot.id, packet_for(slot.id, RequestKind::Initialize));

  int last_daily_day = 0;
  while (state_.phase.kind != PhaseKind::Finished) {
    switch (state_.phase.kind) {
      case PhaseKind::Day0Greeting:
        run_talk_turn(0);
        break;
      case PhaseKind::Night0Divine:
      case PhaseKind::NightDivine:
        run_divine();
        break;
      case PhaseKind::DayTalk:
        if (state_.phase.day != last_daily_day) {
          last_daily_day = state_.phase.day;
          send_daily_initialize();
        }
        run_talk_turn(state_.phase.turn);
        break;
      case PhaseKind::NightVote:
        run_votes();
        break;
      case PhaseKind::NightAttack:
        run_attack();
        break;
      case PhaseKind::Finished:
        break;
    }
  }

  append(LogEvent::game_end(*state_.outcome));
  send_finish();
  return log_;
}

GameLog run_game(GameConfig config, std::vector<ConnectionSlot> slots,
                 std::optional<RoleAssignment> preset) {
  GameServer server(std::move(config), std::move(slots), std::move(preset));
  return server.run();
}

}  // namespace wolf
