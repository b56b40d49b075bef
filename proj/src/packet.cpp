#include "wolf/packet.hpp"

#include <json.hpp>

#include "wolf/errors.hpp"

namespace wolf {

using nlohmann::json;

const char* request_kind_name(RequestKind kind) {
  switch (kind) {
    case RequestKind::Initialize: return "INITIALIZE";
    case RequestKind::DailyInitialize: return "DAILY_INITIALIZE";
    case RequestKind::Talk: return "TALK";
    case RequestKind::Vote: return "VOTE";
    case RequestKind::Divine: return "DIVINE";
    case RequestKind::Attack: return "ATTACK";
    case RequestKind::Finish: return "FINISH";
  }
  throw DomainError("request_kind_name: bad enum value");
}

RequestKind parse_request_kind(const std::string& text) {
  if (text == "INITIALIZE") return RequestKind::Initialize;
  if (text == "DAILY_INITIALIZE") return RequestKind::DailyInitialize;
  if (text == "TALK") return RequestKind::Talk;
  if (text == "VOTE") return RequestKind::Vote;
  if (text == "DIVINE") return RequestKind::Divine;
  if (text == "ATTACK") return RequestKind::Attack;
  if (text == "FINISH") return RequestKind::Finish;
  throw ProtocolViolation("parse_request_kind: unknown request '" + text + "'");
}

bool requires_response(RequestKind kind) {
  switch (kind) {
    case RequestKind::Talk:
    case RequestKind::Vote:
    case RequestKind::Divine:
    case RequestKind::Attack:
      return true;
    case RequestKind::Initialize:
    case RequestKind::DailyInitialize:
    case RequestKind::Finish:
      return false;
  }
  throw DomainError("requires_response: bad enum value");
}

namespace {

json view_to_json(const GameInfoView& view) {
  json info;
  info["day"] = view.day;
  info["phase"] = std::string(phase_label(view.phase));
  info["agentIdx"] = view.receiver.index();
  info["role"] = std::string(role_name(view.receiver_role));

  json status = json::object();
  for (const auto& [id, st] : view.status_map)
    status[std::to_string(id.index())] = agent_status_name(st);
  info["statusMap"] = std::move(status);

  json talks = json::array();
  for (const auto& entry : view.talk_list) {
    talks.push_back({{"agent", entry.speaker.index()},
                     {"day", entry.day},
                     {"text", entry.text},
                     {"turn", entry.turn}});
  }
  info["talkList"] = std::move(talks);

  json divines = json::array();
  for (const auto& record : view.divine_results) {
    divines.push_back({{"agent", record.seer.index()},
                       {"day", record.day},
                       {"result", std::string(species_name(record.result))},
                       {"target", record.target.index()}});
  }
  info["divineResults"] = std::move(divines);

  info["executed"] = view.executed ? json(view.executed->index()) : json(nullptr);
  info["attacked"] = view.attacked ? json(view.attacked->index()) : json(nullptr);
  return info;
}

[[noreturn]] void bad_packet(const std::string& why) {
  throw ProtocolViolation("decode_packet: " + why);
}

int require_int(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number_integer()) bad_packet(std::string(key) + " missing or not an integer");
  return it->get<int>();
}

std::string require_string(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_string()) bad_packet(std::string(key) + " missing or not a string");
  return it->get<std::string>();
}

AgentId agent_from_index(int index, const char* where) {
  if (index < 1 || index > kNumAgents) bad_packet(std::string(where) + " index out of range");
  return AgentId(index);
}

GameInfoView view_from_json(const json& info) {
  if (!info.is_object()) bad_packet("gameInfo is not an object");
  GameInfoView view;
  view.day = require_int(info, "day");
  auto phase = parse_phase(require_string(info, "phase"));
  if (!phase) bad_packet("unknown phase label");
  view.phase = *phase;
  view.receiver = agent_from_index(require_int(info, "agentIdx"), "agentIdx");
  auto role = parse_role(require_string(info, "role"));
  if (!role) bad_packet("unknown role name");
  view.receiver_role = *role;

  auto status_it = info.find("statusMap");
  if (status_it == info.end() || !status_it->is_object()) bad_packet("statusMap missing");
  for (const auto& [key, value] : status_it->items()) {
    int index = 0;
    try {
      index = std::stoi(key);
    } catch (const std::exception&) {
      bad_packet("statusMap key '" + key + "' is not an agent index");
    }
    if (!value.is_string()) bad_packet("statusMap value is not a string");
    AgentStatus parsed;
    try {
      parsed = parse_agent_status(value.get<std::string>());
    } catch (const DomainError&) {
      bad_packet("unknown status in statusMap");
    }
    view.status_map[agent_from_index(index, "statusMap")] = parsed;
  }
  if (view.status_map.size() != static_cast<size_t>(kNumAgents))
    bad_packet("statusMap must cover all five agents");

  auto talks_it = info.find("talkList");
  if (talks_it == info.end() || !talks_it->is_array()) bad_packet("talkList missing");
  for (const auto& node : *talks_it) {
    TalkEntry entry;
    entry.speaker = agent_from_index(require_int(node, "agent"), "talkList agent");
    entry.day = require_int(node, "day");
    entry.turn = require_int(node, "turn");
    entry.text = require_string(node, "text");
    view.talk_list.push_back(std::move(entry));
  }

  auto divines_it = info.find("divineResults");
  if (divines_it == info.end() || !divines_it->is_array()) bad_packet("divineResults missing");
  for (const auto& node : *divines_it) {
    DivineRecord record;
    record.seer = agent_from_index(require_int(node, "agent"), "divineResults agent");
    record.day = require_int(node, "day");
    record.target = agent_from_index(require_int(node, "target"), "divineResults target");
    auto species = parse_species(require_string(node, "result"));
    if (!species) bad_packet("unknown species in divineResults");
    record.result = *species;
    view.divine_results.push_back(record);
  }

  auto executed_it = info.find("executed");
  if (executed_it == info.end()) bad_packet("executed missing");
  if (!executed_it->is_null()) {
    if (!executed_it->is_number_integer()) bad_packet("executed is not an integer");
    view.executed = agent_from_index(executed_it->get<int>(), "executed");
  }
  auto attacked_it = info.find("attacked");
  if (attacked_it == info.end()) bad_packet("attacked missing");
  if (!attacked_it->is_null()) {
    if (!attacked_it->is_number_integer()) bad_packet("attacked is not an integer");
    view.attacked = agent_from_index(attacked_it->get<int>(), "attacked");
  }
  return view;
}

}  // namespace

std::string encode_packet(const Packet& packet) {
  if ((packet.request == RequestKind::Talk) != packet.turn.has_value())
    throw DomainError("encode_packet: turn must be set exactly for talk requests");
  json root;
  root["request"] = request_kind_name(packet.request);
  root["gameInfo"] = view_to_json(packet.game_info);
  if (packet.turn) root["turn"] = *packet.turn;
  return root.dump();
}

Packet decode_packet(const std::string& line) {
  json root = json::parse(line, nullptr, false);
  if (root.is_discarded() || !root.is_object()) bad_packet("line is not a JSON object");

  Packet packet;
  packet.request = parse_request_kind(require_string(root, "request"));
  auto info_it = root.find("gameInfo");
  if (info_it == root.end()) bad_packet("gameInfo missing");
  packet.game_info = view_from_json(*info_it);

  auto turn_it = root.find("turn");
  if (packet.request == RequestKind::Talk) {
    if (turn_it == root.end() || !turn_it->is_number_integer())
      bad_packet("talk packet without a turn");
    packet.turn = turn_it->get<int>();
  } else if (turn_it != root.end()) {
    bad_packet("turn present on a non-talk packet");
  }
  return packet;
}

std::string render_response_line(const AgentResponse& response) {
  switch (response.kind) {
    case AgentResponse::Kind::Talk:
      if (response.text.find('\n') != std::string::npos ||
          response.text.find('\r') != std::string::npos)
        throw DomainError("render_response_line: talk text must be a single line");
      return response.text;
    case AgentResponse::Kind::Target:
      if (!response.target.valid())
        throw DomainError("render_response_line: target response without a target");
      return response.target.label();
    case AgentResponse::Kind::None:
      break;
  }
  throw DomainError("render_response_line: nothing to render");
}

AgentResponse decode_response(RequestKind request, const std::string& line) {
  if (!requires_response(request))
    throw DomainError(std::string("decode_response: ") + request_kind_name(request) +
                      " takes no response");
  std::string trimmed = line;
  while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == '\n'))
    trimmed.pop_back();

  AgentResponse response;
  if (request == RequestKind::Talk) {
    if (trimmed.empty()) throw MalformedResponse("empty talk line");
    response.kind = AgentResponse::Kind::Talk;
    response.text = std::move(trimmed);
    return response;
  }
  auto target = extract_last_agent_ref(trimmed);
  if (!target)
    throw MalformedResponse(std::string("no agent reference in ") +
                            request_kind_name(request) + " reply");
  response.kind = AgentResponse::Kind::Target;
  response.target = *target;
  return response;
}

}  // namespace wolf
