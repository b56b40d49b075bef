#include "wolf/game_log.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "wolf/errors.hpp"

namespace wolf {

using nlohmann::json;

std::string_view log_event_type_name(LogEventType type) {
  switch (type) {
    case LogEventType::GameStart: return "game_start";
    case LogEventType::Talk: return "talk";
    case LogEventType::Vote: return "vote";
    case LogEventType::Exile: return "exile";
    case LogEventType::Attack: return "attack";
    case LogEventType::Divine: return "divine";
    case LogEventType::GameEnd: return "game_end";
  }
  return "game_start";
}

std::optional<LogEventType> parse_log_event_type(std::string_view name) {
  if (name == "game_start") return LogEventType::GameStart;
  if (name == "talk") return LogEventType::Talk;
  if (name == "vote") return LogEventType::Vote;
  if (name == "exile") return LogEventType::Exile;
  if (name == "attack") return LogEventType::Attack;
  if (name == "divine") return LogEventType::Divine;
  if (name == "game_end") return LogEventType::GameEnd;
  return std::nullopt;
}

LogEvent LogEvent::game_start(GameConfig config, RoleAssignment assignment) {
  LogEvent e;
  e.type = LogEventType::GameStart;
  e.config = std::move(config);
  e.assignment = std::move(assignment);
  return e;
}

LogEvent LogEvent::talk(int day, int turn, AgentId speaker, std::string text, bool fallback) {
  LogEvent e;
  e.type = LogEventType::Talk;
  e.day = day;
  e.turn = turn;
  e.actor = speaker;
  e.text = std::move(text);
  e.fallback = fallback;
  return e;
}

LogEvent LogEvent::vote(int day, AgentId voter, AgentId target, bool fallback) {
  LogEvent e;
  e.type = LogEventType::Vote;
  e.day = day;
  e.actor = voter;
  e.target = target;
  e.fallback = fallback;
  return e;
}

LogEvent LogEvent::exile(int day, AgentId target, bool tied) {
  LogEvent e;
  e.type = LogEventType::Exile;
  e.day = day;
  e.target = target;
  e.tied = tied;
  return e;
}

LogEvent LogEvent::attack(int day, AgentId attacker, AgentId victim, bool fallback) {
  LogEvent e;
  e.type = LogEventType::Attack;
  e.day = day;
  e.actor = attacker;
  e.target = victim;
  e.fallback = fallback;
  return e;
}

LogEvent LogEvent::divination(int day, AgentId seer, AgentId target, Species result,
                              bool fallback) {
  LogEvent e;
  e.type = LogEventType::Divine;
  e.day = day;
  e.actor = seer;
  e.target = target;
  e.species = result;
  e.fallback = fallback;
  return e;
}

LogEvent LogEvent::game_end(GameOutcome outcome) {
  LogEvent e;
  e.type = LogEventType::GameEnd;
  e.outcome = outcome;
  return e;
}

const LogEvent& GameLog::start() const {
  if (events.empty() || events.front().type != LogEventType::GameStart)
    throw ReplayError("log does not open with a game_start event", 0);
  return events.front();
}

std::optional<GameOutcome> GameLog::outcome() const {
  if (!events.empty() && events.back().type == LogEventType::GameEnd)
    return events.back().outcome;
  return std::nullopt;
}

namespace {

json event_to_json(const LogEvent& e) {
  json node;
  node["type"] = std::string(log_event_type_name(e.type));
  node["seq"] = e.seq;
  switch (e.type) {
    case LogEventType::GameStart: {
      node["config"] = {{"talkTurnsPerDay", e.config.talk_turns_per_day},
                        {"rngSeed", e.config.rng_seed},
                        {"languagePack", e.config.language_pack}};
      json roles = json::object();
      for (const auto& [id, role] : e.assignment)
        roles[std::to_string(id.index())] = std::string(role_name(role));
      node["roles"] = std::move(roles);
      break;
    }
    case LogEventType::Talk:
      node["day"] = e.day;
      node["turn"] = e.turn;
      node["agent"] = e.actor.index();
      node["text"] = e.text;
      node["fallback"] = e.fallback;
      break;
    case LogEventType::Vote:
      node["day"] = e.day;
      node["agent"] = e.actor.index();
      node["target"] = e.target.index();
      node["fallback"] = e.fallback;
      break;
    case LogEventType::Exile:
      node["day"] = e.day;
      node["target"] = e.target.index();
      node["tied"] = e.tied;
      break;
    case LogEventType::Attack:
      node["day"] = e.day;
      node["agent"] = e.actor.index();
      node["target"] = e.target.index();
      node["fallback"] = e.fallback;
      break;
    case LogEventType::Divine:
      node["day"] = e.day;
      node["agent"] = e.actor.index();
      node["target"] = e.target.index();
      node["result"] = std::string(species_name(*e.species));
      node["fallback"] = e.fallback;
      break;
    case LogEventType::GameEnd:
      node["winner"] = std::string(team_name(e.outcome->winner));
      node["reason"] = std::string(win_reason_name(e.outcome->reason));
      break;
  }
  return node;
}

[[noreturn]] void bad_line(size_t index, const std::string& why) {
  throw ReplayError("line " + std::to_string(index) + ": " + why, index);
}

int get_int(const json& node, const char* key, size_t index) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number_integer())
    bad_line(index, std::string(key) + " missing or not an integer");
  return it->get<int>();
}

std::string get_string(const json& node, const char* key, size_t index) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_string())
    bad_line(index, std::string(key) + " missing or not a string");
  return it->get<std::string>();
}

bool get_bool(const json& node, const char* key, size_t index) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_boolean())
    bad_line(index, std::string(key) + " missing or not a boolean");
  return it->get<bool>();
}

AgentId get_agent(const json& node, const char* key, size_t index) {
  int value = get_int(node, key, index);
  if (value < 1 || value > kNumAgents)
    bad_line(index, std::string(key) + " out of agent range");
  return AgentId(value);
}

LogEvent event_from_json(const json& node, size_t index) {
  if (!node.is_object()) bad_line(index, "not a JSON object");
  auto type = parse_log_event_type(get_string(node, "type", index));
  if (!type) bad_line(index, "unknown event type");

  LogEvent e;
  e.type = *type;
  e.seq = get_int(node, "seq", index);
  switch (e.type) {
    case LogEventType::GameStart: {
      auto config_it = node.find("config");
      if (config_it == node.end() || !config_it->is_object())
        bad_line(index, "config missing");
      e.config.talk_turns_per_day = get_int(*config_it, "talkTurnsPerDay", index);
      auto seed_it = config_it->find("rngSeed");
      if (seed_it == config_it->end() || !seed_it->is_number())
        bad_line(index, "rngSeed missing");
      e.config.rng_seed = seed_it->get<uint64_t>();
      e.config.language_pack = get_string(*config_it, "languagePack", index);
      auto roles_it = node.find("roles");
      if (roles_it == node.end() || !roles_it->is_object())
        bad_line(index, "roles missing");
      for (const auto& [key, value] : roles_it->items()) {
        int agent_index = 0;
        try {
          agent_index = std::stoi(key);
        } catch (const std::exception&) {
          bad_line(index, "roles key is not an agent index");
        }
        if (agent_index < 1 || agent_index > kNumAgents)
          bad_line(index, "roles key out of agent range");
        if (!value.is_string()) bad_line(index, "role value is not a string");
        auto role = parse_role(value.get<std::string>());
        if (!role) bad_line(index, "unknown role name");
        e.assignment[AgentId(agent_index)] = *role;
      }
      break;
    }
    case LogEventType::Talk:
      e.day = get_int(node, "day", index);
      e.turn = get_int(node, "turn", index);
      e.actor = get_agent(node, "agent", index);
      e.text = get_string(node, "text", index);
      e.fallback = get_bool(node, "fallback", index);
      break;
    case LogEventType::Vote:
      e.day = get_int(node, "day", index);
      e.actor = get_agent(node, "agent", index);
      e.target = get_agent(node, "target", index);
      e.fallback = get_bool(node, "fallback", index);
      break;
    case LogEventType::Exile:
      e.day = get_int(node, "day", index);
      e.target = get_agent(node, "target", index);
      e.tied = get_bool(node, "tied", index);
      break;
    case LogEventType::Attack:
      e.day = get_int(node, "day", index);
      e.actor = get_agent(node, "agent", index);
      e.target = get_agent(node, "target", index);
      e.fallback = get_bool(node, "fallback", index);
      break;
    case LogEventType::Divine: {
      e.day = get_int(node, "day", index);
      e.actor = get_agent(node, "agent", index);
      e.target = get_agent(node, "target", index);
      auto species = parse_species(get_string(node, "result", index));
      if (!species) bad_line(index, "unknown species");
      e.species = *species;
      e.fallback = get_bool(node, "fallback", index);
      break;
    }
    case LogEventType::GameEnd: {
      GameOutcome outcome;
      std::string winner = get_string(node, "winner", index);
      if (winner == "HUMAN")
        outcome.winner = Team::Human;
      else if (winner == "WEREWOLF_TEAM")
        outcome.winner = Team::WerewolfTeam;
      else
        bad_line(index, "unknown winner team");
      auto reason = parse_win_reason(get_string(node, "reason", index));
      if (!reason) bad_line(index, "unknown win reason");
      outcome.reason = *reason;
      e.outcome = outcome;
      break;
    }
  }
  return e;
}

}  // namespace

void write_game_log(const GameLog& log, std::ostream& out) {
  for (const auto& event : log.events) out << event_to_json(event).dump() << '\n';
}

void write_game_log_file(const GameLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ReplayError("cannot open log file for writing: " + path.string());
  write_game_log(log, out);
  out.flush();
  if (!out) throw ReplayError("failed writing log file: " + path.string());
}

GameLog read_game_log(std::istream& in) {
  GameLog log;
  std::string line;
  size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) bad_line(index, "empty line");
    json node = json::parse(line, nullptr, false);
    if (node.is_discarded()) bad_line(index, "not valid JSON");
    LogEvent event = event_from_json(node, index);
    if (event.seq != static_cast<int>(index))
      bad_line(index, "seq " + std::to_string(event.seq) + " does not match line order");
    log.events.push_back(std::move(event));
    ++index;
  }
  if (log.events.empty()) throw ReplayError("log holds no events");
  return log;
}

GameLog read_game_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReplayError("cannot open log file: " + path.string());
  return read_game_log(in);
}

}  // namespace wolf
