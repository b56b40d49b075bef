#include "wolf/rules.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>

#include "wolf/errors.hpp"

namespace wolf {

RoleAssignment assign_roles(const GameConfig& config, Rng& rng) {
  config.validate();
  std::vector<Role> deck(kRoleDeck.begin(), kRoleDeck.end());
  rng.shuffle(deck);
  RoleAssignment assignment;
  const auto agents = all_agents();
  for (int i = 0; i < kNumAgents; ++i) assignment[agents[i]] = deck[i];
  return assignment;
}

std::vector<AgentId> speaking_order(const std::vector<AgentId>& alive, Rng& rng) {
  if (alive.empty()) throw DomainError("speaking_order: no alive agents");
  std::vector<AgentId> order = alive;
  rng.shuffle(order);
  return order;
}

Species divine(const RoleAssignment& assignment, AgentId target) {
  auto it = assignment.find(target);
  if (it == assignment.end()) throw DomainError("divine: unknown target " + target.label());
  return species_of(it->second);
}

TallyResult tally_votes(const std::vector<VoteRecord>& votes, Rng& rng) {
  if (votes.empty()) throw DomainError("tally_votes: empty ballot");
  std::map<AgentId, int> counts;
  for (const auto& v : votes) ++counts[v.target];
  int best = 0;
  for (const auto& [_, n] : counts) best = std::max(best, n);
  TallyResult result;
  for (const auto& [id, n] : counts)
    if (n == best) result.leaders.push_back(id);
  std::sort(result.leaders.begin(), result.leaders.end());
  result.exiled = result.leaders.size() == 1 ? result.leaders.front() : rng.pick(result.leaders);
  return result;
}

std::optional<GameOutcome> check_winner(const GameState& state) {
  for (const auto& [day, id] : state.exile_history) {
    (void)day;
    if (state.role_of(id) == Role::Werewolf)
      return GameOutcome{Team::Human, WinReason::WerewolfExiled};
  }
  int wolves = 0;
  int humans = 0;
  for (AgentId id : state.alive_agents()) {
    if (species_of(state.role_of(id)) == Species::Werewolf)
      ++wolves;
    else
      ++humans;
  }
  if (wolves > 0 && wolves >= humans)
    return GameOutcome{Team::WerewolfTeam, WinReason::ParityReached};
  return std::nullopt;
}

GameState initial_state(GameConfig config, RoleAssignment assignment) {
  config.validate();
  if (assignment.size() != static_cast<size_t>(kNumAgents))
    throw DomainError("initial_state: assignment must cover all five agents");
  std::multiset<Role> seen;
  for (const auto& [id, role] : assignment) {
    if (!id.valid()) throw DomainError("initial_state: invalid agent id in assignment");
    seen.insert(role);
  }
  const std::multiset<Role> expected(kRoleDeck.begin(), kRoleDeck.end());
  if (seen != expected)
    throw DomainError("initial_state: role multiset must be wolf/seer/possessed/villager x2");

  GameState state;
  state.config = std::move(config);
  state.assignment = std::move(assignment);
  for (AgentId id : all_agents()) state.alive.insert(id);
  state.phase = Phase{PhaseKind::Day0Greeting, 0, 0};
  return state;
}

namespace {

void expect_phase(const GameState& state, PhaseKind kind, const char* what) {
  if (state.phase.kind != kind)
    throw ProtocolViolation(std::string("step_phase: ") + what + " event in phase " +
                            std::string(phase_label(state.phase.kind)));
}

void validate_talk(const GameState& state, const TalkTurnDone& event) {
  const auto alive = state.alive_agents();
  if (event.entries.size() != alive.size())
    throw DomainError("talk turn must carry exactly one entry per alive agent");
  std::set<AgentId> speakers;
  for (const auto& entry : event.entries) {
    if (entry.day != state.phase.day || entry.turn != state.phase.turn)
      throw DomainError("talk entry stamped with wrong day or turn");
    if (!state.is_alive(entry.speaker))
      throw DomainError("talk entry from dead agent " + entry.speaker.label());
    if (!speakers.insert(entry.speaker).second)
      throw DomainError("duplicate talk entry for " + entry.speaker.label());
    if (entry.text.empty()) throw DomainError("talk entry with empty text");
  }
}

void validate_votes(const GameState& state, const VotesDone& event) {
  const auto alive = state.alive_agents();
  if (event.votes.size() != alive.size())
    throw DomainError("vote round must carry exactly one ballot per alive agent");
  std::set<AgentId> voters;
  for (const auto& v : event.votes) {
    if (v.day != state.phase.day) throw DomainError("vote stamped with wrong day");
    if (!state.is_alive(v.voter)) throw DomainError("vote from dead agent " + v.voter.label());
    if (!state.is_alive(v.target)) throw DomainError("vote for dead agent " + v.target.label());
    if (v.voter == v.target) throw DomainError("self-vote by " + v.voter.label());
    if (!voters.insert(v.voter).second)
      throw DomainError("duplicate ballot from " + v.voter.label());
  }
  // The exiled agent must belong to the argmax set, recomputed here by brute
  // force so a buggy or malicious tally cannot slip through.
  std::map<AgentId, int> counts;
  for (const auto& v : event.votes) ++counts[v.target];
  int best = 0;
  for (const auto& [_, n] : counts) best = std::max(best, n);
  auto it = counts.find(event.exiled);
  if (it == counts.end() || it->second != best)
    throw DomainError("exiled agent is not among the top vote-getters");
}

void validate_attack(const GameState& state, const AttackRecord& record) {
  if (record.day != state.phase.day) throw DomainError("attack stamped with wrong day");
  if (!state.is_alive(record.attacker) ||
      state.role_of(record.attacker) != Role::Werewolf)
    throw DomainError("attacker must be the living werewolf");
  if (!state.is_alive(record.victim)) throw DomainError("attack on dead agent");
  if (record.victim == record.attacker) throw DomainError("werewolf cannot attack itself");
}

void validate_divine(const GameState& state, const DivineRecord& record) {
  if (record.day != state.phase.day) throw DomainError("divination stamped with wrong day");
  if (!state.is_alive(record.seer) || state.role_of(record.seer) != Role::Seer)
    throw DomainError("diviner must be the living seer");
  if (!state.is_alive(record.target)) throw DomainError("divination of dead agent");
  if (record.target == record.seer) throw DomainError("seer cannot divine itself");
  if (record.result != divine(state.assignment, record.target))
    throw DomainError("divination result contradicts the target's species");
}

// Where the game goes after a night phase resolves, given no winner yet.
GameState advance_after_attack(GameState state) {
  const int day = state.phase.day;
  if (auto outcome = check_winner(state)) {
    state.outcome = *outcome;
    state.phase = Phase{PhaseKind::Finished, day, 0};
    return state;
  }
  if (day >= 2) {
    // With five players the day-2 vote always produces a winner before the
    // attack resolves, so reaching this branch means the engine upstream is
    // broken, not that the game needs a third day.
    throw std::logic_error("step_phase: no winner after the day-2 attack");
  }
  AgentId seer = state.seer();
  if (state.is_alive(seer)) {
    state.phase = Phase{PhaseKind::NightDivine, day, 0};
  } else {
    state.phase = Phase{PhaseKind::DayTalk, day + 1, 1};
  }
  return state;
}

}  // namespace

GameState step_phase(GameState state, const PhaseEvent& event) {
  if (state.phase.kind == PhaseKind::Finished)
    throw ProtocolViolation("step_phase: game already finished");

  if (const auto* talk = std::get_if<TalkTurnDone>(&event)) {
    if (state.phase.kind != PhaseKind::Day0Greeting && state.phase.kind != PhaseKind::DayTalk)
      throw ProtocolViolation(std::string("step_phase: talk event in phase ") +
                              std::string(phase_label(state.phase.kind)));
    validate_talk(state, *talk);
    for (const auto& entry : talk->entries) state.talk_history.push_back(entry);
    if (state.phase.kind == PhaseKind::Day0Greeting) {
      state.phase = Phase{PhaseKind::Night0Divine, 0, 0};
    } else if (state.phase.turn < state.config.talk_turns_per_day) {
      state.phase.turn += 1;
    } else {
      state.phase = Phase{PhaseKind::NightVote, state.phase.day, 0};
    }
    return state;
  }

  if (const auto* votes = std::get_if<VotesDone>(&event)) {
    expect_phase(state, PhaseKind::NightVote, "vote");
    validate_votes(state, *votes);
    for (const auto& v : votes->votes) state.vote_history.push_back(v);
    state.exile_history.emplace_back(state.phase.day, votes->exiled);
    state.alive.erase(votes->exiled);
    const int day = state.phase.day;
    if (auto outcome = check_winner(state)) {
      state.outcome = *outcome;
      state.phase = Phase{PhaseKind::Finished, day, 0};
    } else {
      state.phase = Phase{PhaseKind::NightAttack, day, 0};
    }
    return state;
  }

  if (const auto* attack = std::get_if<AttackDone>(&event)) {
    expect_phase(state, PhaseKind::NightAttack, "attack");
    validate_attack(state, attack->record);
    state.attack_history.push_back(attack->record);
    state.alive.erase(attack->record.victim);
    return advance_after_attack(std::move(state));
  }

  const auto& div = std::get<DivineDone>(event);
  if (state.phase.kind != PhaseKind::Night0Divine && state.phase.kind != PhaseKind::NightDivine)
    throw ProtocolViolation(std::string("step_phase: divine event in phase ") +
                            std::string(phase_label(state.phase.kind)));
  validate_divine(state, div.record);
  state.divine_history.push_back(div.record);
  state.phase = Phase{PhaseKind::DayTalk, state.phase.day + 1, 1};
  return state;
}

}  // namespace wolf
