#pragma once

#include <optional>
#include <string>

#include "wolf/view.hpp"

namespace wolf {

enum class RequestKind {
  Initialize,
  DailyInitialize,
  Talk,
  Vote,
  Divine,
  Attack,
  Finish,
};

const char* request_kind_name(RequestKind kind);
RequestKind parse_request_kind(const std::string& text);

// Initialize / DailyInitialize / Finish are notifications; the rest expect
// a one-line reply from the agent.
bool requires_response(RequestKind kind);

// One server->agent message. Encoded as a single JSON line; `turn` is
// present exactly for Talk requests.
struct Packet {
  RequestKind request = RequestKind::Initialize;
  GameInfoView game_info;
  std::optional<int> turn;

  bool operator==(const Packet&) const = default;
};

// Compact single-line JSON with deterministically ordered keys. No newline.
std::string encode_packet(const Packet& packet);

// Strict inverse of encode_packet; throws ProtocolViolation on anything
// that is not a well-formed packet.
Packet decode_packet(const std::string& line);

// One agent->server reply.
struct AgentResponse {
  enum class Kind { None, Talk, Target };
  Kind kind = Kind::None;
  std::string text;  // Talk only
  AgentId target;    // Target only

  bool operator==(const AgentResponse&) const = default;
};

// The reply wire form: the utterance itself for Talk, the "Agent[0k]" label
// for target requests. Throws DomainError for Kind::None or embedded
// newlines.
std::string render_response_line(const AgentResponse& response);

// Interprets a reply line against the request it answers. Talk accepts any
// non-empty line; target requests take the last "Agent[0k]" reference in the
// line. Throws MalformedResponse when no valid reply can be extracted.
AgentResponse decode_response(RequestKind request, const std::string& line);

}  // namespace wolf
