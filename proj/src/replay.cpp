#include "wolf/replay.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "wolf/errors.hpp"

namespace wolf {

namespace {

[[noreturn]] void fail(size_t index, const std::string& why) {
  throw ReplayError("event " + std::to_string(index) + ": " + why, index);
}

const LogEvent& expect(const GameLog& log, size_t index, LogEventType type) {
  if (index >= log.events.size())
    throw ReplayError("log ends early: expected " +
                          std::string(log_event_type_name(type)),
                      log.events.size());
  const LogEvent& event = log.events[index];
  if (event.type != type)
    fail(index, "expected " + std::string(log_event_type_name(type)) + ", found " +
                    std::string(log_event_type_name(event.type)));
  return event;
}

}  // namespace

ReplayCheck verify_replay(const GameLog& log) {
  const LogEvent& start = log.start();
  GameState state;
  try {
    state = initial_state(start.config, start.assignment);
  } catch (const DomainError& err) {
    fail(0, err.what());
  }

  ReplayCheck check;
  size_t index = 1;
  auto apply = [&](const PhaseEvent& event, size_t at) {
    try {
      state = step_phase(std::move(state), event);
    } catch (const std::exception& err) {
      fail(at, err.what());
    }
    check.phase_trace.push_back(state.phase);
  };

  while (state.phase.kind != PhaseKind::Finished) {
    switch (state.phase.kind) {
      case PhaseKind::Day0Greeting:
      case PhaseKind::DayTalk: {
        const size_t first = index;
        TalkTurnDone turn_done;
        for (size_t alive = state.alive.size(); alive > 0; --alive) {
          const LogEvent& event = expect(log, index, LogEventType::Talk);
          turn_done.entries.push_back(
              TalkEntry{event.day, event.turn, event.actor, event.text});
          ++index;
        }
        apply(turn_done, first);
        break;
      }
      case PhaseKind::NightVote: {
        const size_t first = index;
        VotesDone votes_done;
        for (size_t alive = state.alive.size(); alive > 0; --alive) {
          const LogEvent& event = expect(log, index, LogEventType::Vote);
          votes_done.votes.push_back(VoteRecord{event.day, event.actor, event.target});
          ++index;
        }
        const LogEvent& exile = expect(log, index, LogEventType::Exile);

        // The tied flag must reflect the actual ballot: a lone leader may
        // not claim a tie-break and a tie may not hide one.
        std::map<AgentId, int> counts;
        for (const auto& vote : votes_done.votes) ++counts[vote.target];
        int best = 0;
        for (const auto& [_, n] : counts) best = std::max(best, n);
        size_t leaders = 0;
        for (const auto& [_, n] : counts)
          if (n == best) ++leaders;
        if (exile.tied != (leaders > 1))
          fail(index, "tied flag does not match the ballot");
        if (exile.day != state.phase.day) fail(index, "exile stamped with wrong day");

        votes_done.exiled = exile.target;
        ++index;
        apply(votes_done, first);
        break;
      }
      case PhaseKind::NightAttack: {
        const LogEvent& event = expect(log, index, LogEventType::Attack);
        apply(AttackDone{AttackRecord{event.day, event.actor, event.target}}, index);
        ++index;
        break;
      }
      case PhaseKind::Night0Divine:
      case PhaseKind::NightDivine: {
        const LogEvent& event = expect(log, index, LogEventType::Divine);
        if (!event.species) fail(index, "divine event without a result");
        apply(DivineDone{DivineRecord{event.day, event.actor, event.target,
                                      *event.species}},
              index);
        ++index;
        break;
      }
      case PhaseKind::Finished:
        break;
    }
  }

  const LogEvent& end = expect(log, index, LogEventType::GameEnd);
  if (!end.outcome) fail(index, "game_end without an outcome");
  if (!state.outcome) fail(index, "engine reached the end without an outcome");
  if (!(*end.outcome == *state.outcome))
    fail(index, "recorded outcome disagrees with the engine");
  ++index;
  if (index != log.events.size())
    fail(index, "trailing events after game_end");

  check.final_state = std::move(state);
  return check;
}

std::string render_replay(const GameLog& log) {
  const LogEvent& start = log.start();
  std::ostringstream out;
  out << "ROLES\n";
  for (const auto& [id, role] : start.assignment)
    out << "  " << id.label() << " " << role_name(role) << "\n";

  int current_day = -1;
  for (const auto& event : log.events) {
    if (event.type == LogEventType::GameStart) continue;
    if (event.type == LogEventType::GameEnd) {
      out << "RESULT " << team_name(event.outcome->winner) << " "
          << win_reason_name(event.outcome->reason) << "\n";
      continue;
    }
    if (event.day != current_day) {
      current_day = event.day;
      out << "DAY " << current_day << "\n";
    }
    const char* mark = event.fallback ? " (fallback)" : "";
    switch (event.type) {
      case LogEventType::Talk:
        out << "  TALK t" << event.turn << " " << event.actor.label() << mark << ": "
            << event.text << "\n";
        break;
      case LogEventType::Vote:
        out << "  VOTE " << event.actor.label() << " -> " << event.target.label() << mark
            << "\n";
        break;
      case LogEventType::Exile:
        out << "  EXILE " << event.target.label() << (event.tied ? " (tie-break)" : "")
            << "\n";
        break;
      case LogEventType::Attack:
        out << "  ATTACK " << event.actor.label() << " -> " << event.target.label()
            << mark << "\n";
        break;
      case LogEventType::Divine:
        out << "  DIVINE " << event.actor.label() << " -> " << event.target.label()
            << " = " << species_name(*event.species) << mark << "\n";
        break;
      case LogEventType::GameStart:
      case LogEventType::GameEnd:
        break;
    }
  }
  return out.str();
}

}  // namespace wolf
